#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpox {

/// Compartment indices of the state vector.
enum StateIndex : std::size_t {
    kSh = 0, // susceptible humans
    kEh = 1, // exposed humans
    kIh = 2, // infected humans
    kQh = 3, // isolated humans
    kRh = 4, // recovered humans
    kSr = 5, // susceptible rodents
    kEr = 6, // exposed rodents
    kIr = 7, // infected rodents
};

using State = std::array<double, 8>;
using Control = std::array<double, 3>;
using Costate = std::array<double, 8>;

inline constexpr double kControlUpperBound = 0.9;

/// Base (unexponentiated) epidemiological rates, per month, plus the
/// fractional order. Defaults are the simulation set of the source model.
struct ModelParams {
    double theta_h = 0.029; // human recruitment
    double theta_r = 0.2;   // rodent recruitment
    double beta_1 = 0.00025; // rodent-to-human transmission
    double beta_2 = 9.0;     // human-to-human transmission
    double beta_3 = 6.0;     // rodent-to-rodent transmission
    double alpha_1 = 0.3; // exposed-to-infected progression (human)
    double alpha_2 = 2.0; // exposed-to-isolated progression (human)
    double alpha_3 = 0.2; // exposed-to-infected progression (rodent)
    double phi = 2.0;    // undetected return from isolation
    double tau = 0.52;   // isolation-to-recovered
    double gamma = 1.0 / 21.0; // recovery
    double mu_h = 0.02; // human natural death
    double mu_r = 1.5;  // rodent natural death
    double delta_h = 0.2; // human disease death
    double delta_r = 0.5; // rodent disease death
    double alpha = 1.0;   // fractional order in (0, 1]

    void validate() const;
};

/// Rates raised to the fractional order (unit consistency of the system);
/// controls are never exponentiated. Built once per run.
struct EffectiveRates {
    double theta_h, theta_r;
    double beta_1, beta_2, beta_3;
    double alpha_1, alpha_2, alpha_3;
    double phi, tau, gamma;
    double mu_h, mu_r;
    double delta_h, delta_r;
    double alpha;
};

EffectiveRates effective_params(const ModelParams& p);

class SingularPopulationError : public std::domain_error {
public:
    explicit SingularPopulationError(const std::string& which)
        : std::domain_error("population denominator " + which +
                            " is not positive") {}
};

/// The eight compartment kernels G1..G8 of the controlled system.
State rhs_controlled(double t, const State& x, const Control& u,
                     const EffectiveRates& r);

struct ValidationReport {
    bool positivity_ok = true;
    bool bounds_ok = true;
    double min_component = 0.0;
    double n_h = 0.0;
    double n_r = 0.0;
    std::vector<std::string> violations;
    bool ok() const { return positivity_ok && bounds_ok; }
};

/// Positivity scan of a single state (components >= -tol).
ValidationReport validate_state(const State& x, double tol);

/// Positivity scan plus the invariant-region population bounds
/// N_h <= theta_h^a / mu_h^a and N_r <= theta_r^a / mu_r^a, asserted only
/// when the corresponding initial population already satisfied its bound.
ValidationReport validate_state(const State& x, double tol,
                                const EffectiveRates& r, const State& initial);

} // namespace mpox
