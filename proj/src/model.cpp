#include "mpox/model.hpp"

#include <cmath>

namespace mpox {

namespace {

constexpr double kPopulationFloor = 1e-12;

void require(bool ok, const char* msg)
{
    if (!ok) {
        throw std::invalid_argument(msg);
    }
}

} // namespace

void ModelParams::validate() const
{
    const double rates[] = {theta_h, theta_r, beta_1,  beta_2,  beta_3,
                            alpha_1, alpha_2, alpha_3, phi,     tau,
                            gamma,   delta_h, delta_r, mu_h,    mu_r};
    for (double r : rates) {
        require(std::isfinite(r) && r >= 0.0, "model rates must be finite and non-negative");
    }
    require(mu_h > 0.0 && mu_r > 0.0, "natural death rates must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "fractional order must lie in (0, 1]");
}

EffectiveRates effective_params(const ModelParams& p)
{
    p.validate();
    const double a = p.alpha;
    auto up = [a](double r) { return std::pow(r, a); };
    return EffectiveRates{
        up(p.theta_h), up(p.theta_r),
        up(p.beta_1),  up(p.beta_2),  up(p.beta_3),
        up(p.alpha_1), up(p.alpha_2), up(p.alpha_3),
        up(p.phi),     up(p.tau),     up(p.gamma),
        up(p.mu_h),    up(p.mu_r),
        up(p.delta_h), up(p.delta_r),
        a,
    };
}

State rhs_controlled(double, const State& x, const Control& u,
                     const EffectiveRates& r)
{
    const double n_h = x[kSh] + x[kEh] + x[kIh] + x[kQh] + x[kRh];
    const double n_r = x[kSr] + x[kEr] + x[kIr];
    if (n_h < kPopulationFloor) {
        throw SingularPopulationError("N_h");
    }
    if (n_r < kPopulationFloor) {
        throw SingularPopulationError("N_r");
    }

    const double foi_h = (r.beta_1 * x[kIr] + r.beta_2 * x[kIh]) / n_h;
    const double foi_r = r.beta_3 * x[kIr] / n_r;

    State g;
    g[kSh] = r.theta_h - foi_h * x[kSh] - r.mu_h * x[kSh] + r.phi * x[kQh] -
             u[0] * x[kSh];
    g[kEh] = foi_h * x[kSh] - (r.alpha_1 + r.alpha_2 + r.mu_h) * x[kEh];
    g[kIh] = r.alpha_1 * x[kEh] -
             (r.mu_h + r.delta_h + r.gamma) * x[kIh] - u[1] * x[kIh] -
             u[2] * x[kIh];
    g[kQh] = r.alpha_2 * x[kEh] -
             (r.phi + r.tau + r.mu_h + r.delta_h) * x[kQh] + u[2] * x[kIh];
    g[kRh] = r.gamma * x[kIh] + r.tau * x[kQh] - r.mu_h * x[kRh] +
             u[0] * x[kSh] + u[1] * x[kIh];
    g[kSr] = r.theta_r - foi_r * x[kSr] - r.mu_r * x[kSr];
    g[kEr] = foi_r * x[kSr] - (r.mu_r + r.alpha_3) * x[kEr];
    g[kIr] = r.alpha_3 * x[kEr] - (r.mu_r + r.delta_r) * x[kIr];
    return g;
}

namespace {

const char* compartment_name(std::size_t i)
{
    static const char* names[] = {"S_h", "E_h", "I_h", "Q_h",
                                  "R_h", "S_r", "E_r", "I_r"};
    return names[i];
}

ValidationReport scan_positivity(const State& x, double tol)
{
    ValidationReport report;
    report.min_component = x[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        report.min_component = std::min(report.min_component, x[i]);
        if (x[i] < -tol) {
            report.positivity_ok = false;
            report.violations.push_back(std::string(compartment_name(i)) +
                                        " = " + std::to_string(x[i]) +
                                        " below 0");
        }
    }
    report.n_h = x[kSh] + x[kEh] + x[kIh] + x[kQh] + x[kRh];
    report.n_r = x[kSr] + x[kEr] + x[kIr];
    if (report.n_h == 0.0) {
        report.violations.push_back("note: N_h = 0");
    }
    if (report.n_r == 0.0) {
        report.violations.push_back("note: N_r = 0");
    }
    return report;
}

} // namespace

ValidationReport validate_state(const State& x, double tol)
{
    return scan_positivity(x, tol);
}

ValidationReport validate_state(const State& x, double tol,
                                const EffectiveRates& r, const State& initial)
{
    ValidationReport report = scan_positivity(x, tol);
    const double bound_h = r.theta_h / r.mu_h;
    const double bound_r = r.theta_r / r.mu_r;
    const double init_h =
        initial[kSh] + initial[kEh] + initial[kIh] + initial[kQh] + initial[kRh];
    const double init_r = initial[kSr] + initial[kEr] + initial[kIr];
    if (init_h <= bound_h && report.n_h > bound_h + tol) {
        report.bounds_ok = false;
        report.violations.push_back("N_h = " + std::to_string(report.n_h) +
                                    " exceeds bound " + std::to_string(bound_h));
    }
    if (init_r <= bound_r && report.n_r > bound_r + tol) {
        report.bounds_ok = false;
        report.violations.push_back("N_r = " + std::to_string(report.n_r) +
                                    " exceeds bound " + std::to_string(bound_r));
    }
    return report;
}

} // namespace mpox
