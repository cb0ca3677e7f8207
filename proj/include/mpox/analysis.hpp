#pragma once

#include "mpox/frac_solver.hpp"
#include "mpox/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mpox {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EquilibriumKind { disease_free, endemic };

struct EquilibriumReport {
    EquilibriumKind kind = EquilibriumKind::disease_free;
    State state{};
    double residual = 0.0; // max |kernel| at the state
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0, k5 = 0.0;
    double phi_h = 0.0, phi_r = 0.0; // forces of infection at equilibrium
};

/// Disease-free equilibrium (theta_h^a/mu_h^a, 0,0,0,0, theta_r^a/mu_r^a, 0,0),
/// residual-checked against the uncontrolled kernels.
EquilibriumReport disease_free_equilibrium(const ModelParams& p);

/// Endemic equilibrium for time-frozen controls, solved as two nested damped
/// scalar fixed points (rodent force of infection, then human). Returns
/// nullopt when no positive fixed point exists; throws ConvergenceError when
/// the iteration cap is reached.
std::optional<EquilibriumReport> endemic_equilibrium(const ModelParams& p,
                                                     const Control& u);

/// Closed-form reproduction number of the controlled system,
/// a1^a b2^a / (k1 k2). Only the human transmission loop enters.
double basic_reproduction_number(const ModelParams& p, double u2, double u3);

/// Spectral radius of the numerical next-generation matrix F0 V0^{-1} over
/// the five infected compartments; includes the rodent loop that the closed
/// form omits.
double ngm_spectral_radius(const ModelParams& p, const Control& u);

/// Analytic Jacobian of the controlled kernels at x.
Eigen::Matrix<double, 8, 8> jacobian_at(const EffectiveRates& r,
                                        const Control& u, const State& x);
Eigen::Matrix<double, 8, 8> jacobian_at(const ModelParams& p, const Control& u,
                                        const State& x);

/// Eigenvalues of a real dense matrix (balanced Hessenberg reduction plus
/// shifted QR). Every eigenpair residual ||(M - lambda I) v|| / ||M|| must
/// come out <= 1e-8 or a ConvergenceError is raised.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

struct StabilityVerdict {
    std::vector<std::complex<double>> eigenvalues;
    double margin = 0.0; // min over i of |arg(lambda_i)| - alpha*pi/2
    bool stable = false;
};

/// Fractional eigenvalue condition |arg(lambda)| > alpha*pi/2 for every
/// eigenvalue; arg taken in (-pi, pi].
StabilityVerdict stability_check(const std::vector<std::complex<double>>& eigs,
                                 double alpha);

/// Sup-bounds of the compartments plus the population denominators used when
/// evaluating the kernel Lipschitz coefficients.
struct CompartmentBounds {
    std::array<double, 8> m{};
    double n_h = 1.0;
    double n_r = 1.0;

    /// Invariant-region bounds theta^a/mu^a for every compartment of the
    /// respective species; denominators from the supplied populations.
    static CompartmentBounds invariant_region(const EffectiveRates& r,
                                              double n_h, double n_r);
};

struct ContractionCertificate {
    std::array<double, 8> lipschitz{};
    CompartmentBounds bounds;
    double horizon = 0.0; // M0
    double prefactor = 0.0; // (1-a)/B(a) + M0^a/(B(a) Gamma(a))
    std::array<double, 8> factors{};
    bool satisfied = false;
};

/// Existence certificate: each kernel's Lipschitz coefficient over the box,
/// scaled by the horizon prefactor; satisfied when all eight factors < 1.
ContractionCertificate contraction_certificate(const ModelParams& p,
                                               const Control& u_max,
                                               const CompartmentBounds& bounds,
                                               double horizon,
                                               KernelNormalization norm);

} // namespace mpox
