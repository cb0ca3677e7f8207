#include "mpox/analysis.hpp"

#include "mpox/special_functions.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace mpox {

namespace {

struct LossRates {
    double k1, k2, k3, k4, k5;
};

LossRates loss_rates(const EffectiveRates& r, const Control& u)
{
    return LossRates{
        r.alpha_1 + r.alpha_2 + r.mu_h,
        r.mu_h + r.delta_h + r.gamma + u[1] + u[2],
        r.phi + r.tau + r.mu_h + r.delta_h,
        r.mu_r + r.alpha_3,
        r.mu_r + r.delta_r,
    };
}

double kernel_residual(const EffectiveRates& r, const Control& u,
                       const State& x)
{
    const State g = rhs_controlled(0.0, x, u, r);
    double worst = 0.0;
    for (double gi : g) {
        worst = std::max(worst, std::abs(gi));
    }
    return worst;
}

/// Damped fixed-point iteration phi <- (1-d) phi + d map(phi), clamped to
/// phi >= 0. Returns the converged value.
template <typename Map>
double damped_fixed_point(double phi0, const Map& map, const char* label)
{
    constexpr double kDamping = 0.5;
    constexpr double kTol = 1e-12;
    constexpr int kMaxIters = 10000;

    double phi = std::max(phi0, 0.0);
    for (int i = 0; i < kMaxIters; ++i) {
        const double next =
            std::max((1.0 - kDamping) * phi + kDamping * map(phi), 0.0);
        const double delta = std::abs(next - phi);
        phi = next;
        if (delta <= kTol * std::max(1.0, std::abs(phi))) {
            return phi;
        }
    }
    throw ConvergenceError(std::string("fixed-point iteration for ") + label +
                           " did not converge");
}

struct RodentBranch {
    double s, e, i, phi;
};

/// Rodent compartments implied by a frozen force of infection phi_r.
RodentBranch rodent_for(const EffectiveRates& r, const LossRates& k, double phi)
{
    RodentBranch b;
    b.phi = phi;
    b.s = r.theta_r / (phi + r.mu_r);
    b.e = phi * b.s / k.k4;
    b.i = r.alpha_3 * b.e / k.k5;
    return b;
}

struct HumanBranch {
    double s, e, i, q, rec, phi;
};

/// Human compartments implied by a frozen force of infection phi_h, given the
/// rodent infected level. Q_h is proportional to S_h, which keeps G1 linear
/// in S_h and solvable directly.
HumanBranch human_for(const EffectiveRates& r, const Control& u,
                      const LossRates& k, double phi)
{
    HumanBranch b;
    b.phi = phi;
    const double q_per_s =
        phi * (r.alpha_2 + u[2] * r.alpha_1 / k.k2) / (k.k1 * k.k3);
    b.s = r.theta_h / (phi + r.mu_h + u[0] - r.phi * q_per_s);
    b.e = phi * b.s / k.k1;
    b.i = r.alpha_1 * b.e / k.k2;
    b.q = q_per_s * b.s;
    b.rec = (r.gamma * b.i + r.tau * b.q + u[1] * b.i + u[0] * b.s) / r.mu_h;
    return b;
}

} // namespace

EquilibriumReport disease_free_equilibrium(const ModelParams& p)
{
    const EffectiveRates r = effective_params(p);
    const Control u{0.0, 0.0, 0.0};
    const LossRates k = loss_rates(r, u);

    EquilibriumReport report;
    report.kind = EquilibriumKind::disease_free;
    report.state = State{r.theta_h / r.mu_h, 0.0, 0.0, 0.0, 0.0,
                         r.theta_r / r.mu_r, 0.0, 0.0};
    report.k1 = k.k1;
    report.k2 = k.k2;
    report.k3 = k.k3;
    report.k4 = k.k4;
    report.k5 = k.k5;
    report.residual = kernel_residual(r, u, report.state);
    return report;
}

std::optional<EquilibriumReport> endemic_equilibrium(const ModelParams& p,
                                                     const Control& u)
{
    const EffectiveRates r = effective_params(p);
    const LossRates k = loss_rates(r, u);
    constexpr double kNegligible = 1e-10;

    // Rodent loop first: it is self-contained, and the human loop only sees
    // it through I_r. A positive fixed point exists iff the rodent loop's
    // own reproduction number exceeds one.
    const double rodent_r0 = r.beta_3 * r.alpha_3 / (k.k4 * k.k5);
    double phi_r = 0.0;
    if (rodent_r0 > 1.0) {
        const double guess = (rodent_r0 - 1.0) * k.k4 * k.k5 / (k.k5 + r.alpha_3);
        phi_r = damped_fixed_point(
            guess,
            [&](double phi) {
                const RodentBranch b = rodent_for(r, k, phi);
                const double n = b.s + b.e + b.i;
                return r.beta_3 * b.i / n;
            },
            "rodent force of infection");
    }
    const RodentBranch rodent = rodent_for(r, k, phi_r);

    const double human_r0 = r.alpha_1 * r.beta_2 / (k.k1 * k.k2);
    const double guess = std::max(r.mu_h * (human_r0 - 1.0), 1e-4);
    const double phi_h = damped_fixed_point(
        guess,
        [&](double phi) {
            const HumanBranch b = human_for(r, u, k, phi);
            const double n = b.s + b.e + b.i + b.q + b.rec;
            return (r.beta_1 * rodent.i + r.beta_2 * b.i) / n;
        },
        "human force of infection");

    if (phi_h < kNegligible && phi_r < kNegligible) {
        return std::nullopt;
    }

    const HumanBranch human = human_for(r, u, k, phi_h);

    EquilibriumReport report;
    report.kind = EquilibriumKind::endemic;
    report.state = State{human.s, human.e,  human.i,  human.q,
                         human.rec, rodent.s, rodent.e, rodent.i};
    report.k1 = k.k1;
    report.k2 = k.k2;
    report.k3 = k.k3;
    report.k4 = k.k4;
    report.k5 = k.k5;
    report.phi_h = phi_h;
    report.phi_r = phi_r;
    report.residual = kernel_residual(r, u, report.state);
    return report;
}

double basic_reproduction_number(const ModelParams& p, double u2, double u3)
{
    const EffectiveRates r = effective_params(p);
    const LossRates k = loss_rates(r, Control{0.0, u2, u3});
    return r.alpha_1 * r.beta_2 / (k.k1 * k.k2);
}

double ngm_spectral_radius(const ModelParams& p, const Control& u)
{
    const EffectiveRates r = effective_params(p);
    const LossRates k = loss_rates(r, u);

    // Infected compartments, in order: E_h, I_h, Q_h, E_r, I_r. At the
    // controlled disease-free state S_h/N_h = mu_h/(mu_h + u1) because the
    // vaccinated fraction sits in R_h; rodents are uncontrolled.
    const double sh_frac = r.mu_h / (r.mu_h + u[0]);

    Eigen::Matrix<double, 5, 5> f = Eigen::Matrix<double, 5, 5>::Zero();
    f(0, 1) = r.beta_2 * sh_frac;
    f(0, 4) = r.beta_1 * sh_frac;
    f(3, 4) = r.beta_3;

    Eigen::Matrix<double, 5, 5> v = Eigen::Matrix<double, 5, 5>::Zero();
    v(0, 0) = k.k1;
    v(1, 0) = -r.alpha_1;
    v(1, 1) = k.k2;
    v(2, 0) = -r.alpha_2;
    v(2, 1) = -u[2];
    v(2, 2) = k.k3;
    v(3, 3) = k.k4;
    v(4, 3) = -r.alpha_3;
    v(4, 4) = k.k5;

    const Eigen::MatrixXd ngm = f * v.inverse();
    double radius = 0.0;
    for (const auto& lambda : eigenvalues(ngm)) {
        radius = std::max(radius, std::abs(lambda));
    }
    return radius;
}

Eigen::Matrix<double, 8, 8> jacobian_at(const EffectiveRates& r,
                                        const Control& u, const State& x)
{
    const double n_h = x[kSh] + x[kEh] + x[kIh] + x[kQh] + x[kRh];
    const double n_r = x[kSr] + x[kEr] + x[kIr];
    if (n_h <= 0.0) {
        throw SingularPopulationError("N_h");
    }
    if (n_r <= 0.0) {
        throw SingularPopulationError("N_r");
    }

    const double foi_h = (r.beta_1 * x[kIr] + r.beta_2 * x[kIh]) / n_h;
    const double foi_r = r.beta_3 * x[kIr] / n_r;
    const double sh_frac = x[kSh] / n_h;
    const double sr_frac = x[kSr] / n_r;

    // Partials of the human infection term foi_h * S_h.
    const double t_sh = foi_h * (1.0 - sh_frac);
    const double t_pop = -foi_h * sh_frac; // any of E_h, Q_h, R_h
    const double t_ih = (r.beta_2 - foi_h) * sh_frac;
    const double t_ir = r.beta_1 * sh_frac;

    // Partials of the rodent infection term foi_r * S_r.
    const double w_sr = foi_r * (1.0 - sr_frac);
    const double w_er = -foi_r * sr_frac;
    const double w_ir = (r.beta_3 - foi_r) * sr_frac;

    Eigen::Matrix<double, 8, 8> j = Eigen::Matrix<double, 8, 8>::Zero();

    j(kSh, kSh) = -t_sh - r.mu_h - u[0];
    j(kSh, kEh) = -t_pop;
    j(kSh, kIh) = -t_ih;
    j(kSh, kQh) = -t_pop + r.phi;
    j(kSh, kRh) = -t_pop;
    j(kSh, kIr) = -t_ir;

    j(kEh, kSh) = t_sh;
    j(kEh, kEh) = t_pop - (r.alpha_1 + r.alpha_2 + r.mu_h);
    j(kEh, kIh) = t_ih;
    j(kEh, kQh) = t_pop;
    j(kEh, kRh) = t_pop;
    j(kEh, kIr) = t_ir;

    j(kIh, kEh) = r.alpha_1;
    j(kIh, kIh) = -(r.mu_h + r.delta_h + r.gamma + u[1] + u[2]);

    j(kQh, kEh) = r.alpha_2;
    j(kQh, kIh) = u[2];
    j(kQh, kQh) = -(r.phi + r.tau + r.mu_h + r.delta_h);

    j(kRh, kSh) = u[0];
    j(kRh, kIh) = r.gamma + u[1];
    j(kRh, kQh) = r.tau;
    j(kRh, kRh) = -r.mu_h;

    j(kSr, kSr) = -w_sr - r.mu_r;
    j(kSr, kEr) = -w_er;
    j(kSr, kIr) = -w_ir;

    j(kEr, kSr) = w_sr;
    j(kEr, kEr) = w_er - (r.mu_r + r.alpha_3);
    j(kEr, kIr) = w_ir;

    j(kIr, kEr) = r.alpha_3;
    j(kIr, kIr) = -(r.mu_r + r.delta_r);

    return j;
}

Eigen::Matrix<double, 8, 8> jacobian_at(const ModelParams& p, const Control& u,
                                        const State& x)
{
    return jacobian_at(effective_params(p), u, x);
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eigenvalues requires a square matrix");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("eigenvalue iteration failed");
    }

    const double scale = std::max(m.norm(), 1e-300);
    const auto values = solver.eigenvalues();
    const auto vectors = solver.eigenvectors();
    const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const Eigen::VectorXcd v = vectors.col(i).normalized();
        const double residual = (mc * v - values(i) * v).norm() / scale;
        if (!(residual <= 1e-8)) {
            throw ConvergenceError("eigenpair residual " +
                                   std::to_string(residual) + " exceeds 1e-8");
        }
    }

    std::vector<std::complex<double>> out(values.data(),
                                          values.data() + values.size());
    return out;
}

StabilityVerdict stability_check(const std::vector<std::complex<double>>& eigs,
                                 double alpha)
{
    if (alpha <= 0.0 || alpha > 1.0) {
        throw std::invalid_argument("fractional order must lie in (0, 1]");
    }
    StabilityVerdict verdict;
    verdict.eigenvalues = eigs;
    const double threshold = alpha * std::acos(-1.0) / 2.0;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& lambda : eigs) {
        margin = std::min(margin, std::abs(std::arg(lambda)) - threshold);
    }
    verdict.margin = margin;
    verdict.stable = margin > 0.0;
    return verdict;
}

CompartmentBounds CompartmentBounds::invariant_region(const EffectiveRates& r,
                                                      double n_h, double n_r)
{
    CompartmentBounds b;
    const double human = r.theta_h / r.mu_h;
    const double rodent = r.theta_r / r.mu_r;
    for (std::size_t i = kSh; i <= kRh; ++i) {
        b.m[i] = human;
    }
    for (std::size_t i = kSr; i <= kIr; ++i) {
        b.m[i] = rodent;
    }
    b.n_h = n_h;
    b.n_r = n_r;
    return b;
}

ContractionCertificate contraction_certificate(const ModelParams& p,
                                               const Control& u_max,
                                               const CompartmentBounds& bounds,
                                               double horizon,
                                               KernelNormalization norm)
{
    if (!(horizon > 0.0) || !(bounds.n_h > 0.0) || !(bounds.n_r > 0.0)) {
        throw std::invalid_argument(
            "contraction certificate needs a positive horizon and populations");
    }
    const EffectiveRates r = effective_params(p);
    const LossRates k = loss_rates(r, u_max);

    ContractionCertificate cert;
    cert.bounds = bounds;
    cert.horizon = horizon;

    cert.lipschitz[kSh] =
        (r.beta_1 * bounds.m[kIr] + r.beta_2 * bounds.m[kIh]) / bounds.n_h +
        r.mu_h + u_max[0];
    cert.lipschitz[kEh] = k.k1;
    cert.lipschitz[kIh] = k.k2;
    cert.lipschitz[kQh] = k.k3;
    cert.lipschitz[kRh] = r.mu_h;
    cert.lipschitz[kSr] = r.beta_3 * bounds.m[kIr] / bounds.n_r + r.mu_r;
    cert.lipschitz[kEr] = k.k4;
    cert.lipschitz[kIr] = k.k5;

    const double b_alpha = norm.value(p.alpha);
    cert.prefactor = (1.0 - p.alpha) / b_alpha +
                     std::pow(horizon, p.alpha) / (b_alpha * gamma_fn(p.alpha));

    cert.satisfied = true;
    for (std::size_t i = 0; i < cert.factors.size(); ++i) {
        cert.factors[i] = cert.prefactor * cert.lipschitz[i];
        if (!(cert.factors[i] < 1.0)) {
            cert.satisfied = false;
        }
    }
    return cert;
}

} // namespace mpox
