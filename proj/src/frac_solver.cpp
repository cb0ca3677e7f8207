#include "mpox/frac_solver.hpp"

#include "mpox/special_functions.hpp"

#include <algorithm>
#include <cmath>

namespace mpox {

Grid Grid::make(double t_f, double h)
{
    if (!(h > 0.0) || !(t_f > 0.0)) {
        throw std::invalid_argument("grid requires t_f > 0 and h > 0");
    }
    const double ratio = t_f / h;
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    if (n < 2 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
        throw std::invalid_argument("t_f must be an integer multiple (>= 2) of h");
    }
    return Grid{t_f, h, n};
}

double KernelNormalization::value(double alpha) const
{
    switch (variant) {
    case KernelVariant::unit:
        return 1.0;
    case KernelVariant::ab_original:
        return 1.0 - alpha + alpha / gamma_fn(alpha);
    }
    return 1.0;
}

double weight_a(std::size_t j, std::size_t n, double alpha, CorrectorSign sign)
{
    if (j > n) {
        throw std::out_of_range("weight_a requires j <= n");
    }
    const double dn = static_cast<double>(n);
    if (j == 0) {
        return std::pow(dn, alpha + 1.0) - (dn - alpha) * std::pow(dn + 1.0, alpha);
    }
    const double m = static_cast<double>(n - j);
    const double outer = std::pow(m + 2.0, alpha + 1.0);
    const double inner = std::pow(m, alpha + 1.0);
    const double mid = 2.0 * std::pow(m + 1.0, alpha + 1.0);
    return sign == CorrectorSign::standard_plus ? outer + inner - mid
                                                : outer - inner - mid;
}

double weight_b(std::size_t j, std::size_t n, double alpha)
{
    if (j > n) {
        throw std::out_of_range("weight_b requires j <= n");
    }
    const double m = static_cast<double>(n - j);
    return std::pow(m + 1.0, alpha) - std::pow(m, alpha);
}

namespace {

struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v)
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

bool all_finite(std::span<const double> x)
{
    return std::all_of(x.begin(), x.end(),
                       [](double v) { return std::isfinite(v); });
}

} // namespace

namespace detail {

Trajectory solve_nodes(const NodeRhs& rhs, std::span<const double> x0,
                       double alpha, const Grid& grid, KernelNormalization norm,
                       SchemeOptions options)
{
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("fractional order must lie in (0, 1]");
    }
    const std::size_t dim = x0.size();
    const std::size_t n_steps = grid.steps;

    Trajectory traj;
    traj.grid = grid;
    traj.dim = dim;
    traj.data.assign(grid.nodes() * dim, 0.0);
    std::copy(x0.begin(), x0.end(), traj.node(0).begin());

    // k^alpha and k^(alpha+1) tables; the step weights reduce to differences
    // of these, matching weight_a / weight_b exactly.
    std::vector<double> pow_a(n_steps + 2), pow_a1(n_steps + 2);
    for (std::size_t k = 0; k <= n_steps + 1; ++k) {
        pow_a[k] = std::pow(static_cast<double>(k), alpha);
        pow_a1[k] = std::pow(static_cast<double>(k), alpha + 1.0);
    }

    const double b_norm = norm.value(alpha);
    const double local_coef =
        options.nonlocal_term == NonlocalTerm::ab_integral ? (1.0 - alpha) / b_norm : 0.0;
    const double history_scale =
        options.nonlocal_term == NonlocalTerm::ab_integral ? alpha / b_norm : 1.0;
    const double h_alpha = std::pow(grid.h, alpha);
    const double pred_coef = history_scale * h_alpha / gamma_fn(alpha + 1.0);
    const double corr_coef = history_scale * h_alpha / gamma_fn(alpha + 2.0);
    const bool plus_sign = options.corrector_sign == CorrectorSign::standard_plus;

    // f(t_j, X_j) history, node-major.
    std::vector<double> history(grid.nodes() * dim);
    std::vector<double> xp(dim), f_local(dim), f_pred(dim);
    std::vector<CompensatedSum> pred_sum(dim), corr_sum(dim);

    rhs(grid.time(0), 0, traj.node(0), {history.data(), dim});
    traj.stats.rhs_evaluations = 1;

    for (std::size_t n = 0; n < n_steps; ++n) {
        const double t_next = grid.time(n + 1);

        for (std::size_t d = 0; d < dim; ++d) {
            pred_sum[d] = CompensatedSum{};
            corr_sum[d] = CompensatedSum{};
        }
        for (std::size_t j = 0; j <= n; ++j) {
            const std::size_t m = n - j;
            const double bw = pow_a[m + 1] - pow_a[m];
            double aw;
            if (j == 0) {
                aw = pow_a1[n] -
                     (static_cast<double>(n) - alpha) * pow_a[n + 1];
            } else {
                aw = plus_sign ? pow_a1[m + 2] + pow_a1[m] - 2.0 * pow_a1[m + 1]
                               : pow_a1[m + 2] - pow_a1[m] - 2.0 * pow_a1[m + 1];
            }
            const double* fj = history.data() + j * dim;
            for (std::size_t d = 0; d < dim; ++d) {
                pred_sum[d].add(bw * fj[d]);
                corr_sum[d].add(aw * fj[d]);
            }
        }
        traj.stats.history_terms += n + 1;

        // Predictor; its local Mittag-Leffler term lags the state one node
        // but uses the control sample at n+1.
        auto x_prev = traj.node(n);
        if (local_coef != 0.0) {
            rhs(t_next, n + 1, x_prev, f_local);
            ++traj.stats.rhs_evaluations;
        }
        for (std::size_t d = 0; d < dim; ++d) {
            xp[d] = x0[d] + pred_coef * pred_sum[d].value();
            if (local_coef != 0.0) {
                xp[d] += local_coef * f_local[d];
            }
        }

        rhs(t_next, n + 1, xp, f_pred);
        ++traj.stats.rhs_evaluations;

        auto x_next = traj.node(n + 1);
        for (std::size_t d = 0; d < dim; ++d) {
            x_next[d] = x0[d] + local_coef * f_pred[d] +
                        corr_coef * (f_pred[d] + corr_sum[d].value());
        }
        if (!all_finite(x_next)) {
            throw DivergenceError(n + 1, t_next);
        }

        // The corrector equation is implicit through the local term, whose
        // weight does not vanish with h; a single pass leaves an O(1)
        // residual inside the initial layer. Polish with a damped fixed
        // point until the update is negligible (immediately true away from
        // the layer).
        if (local_coef != 0.0) {
            constexpr int kMaxPolish = 60;
            constexpr double kPolishTol = 1e-11;
            for (int it = 0; it < kMaxPolish; ++it) {
                rhs(t_next, n + 1, x_next, f_pred);
                ++traj.stats.rhs_evaluations;
                double delta = 0.0;
                double scale = 1.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const double target =
                        x0[d] + local_coef * f_pred[d] +
                        corr_coef * (f_pred[d] + corr_sum[d].value());
                    const double mixed = 0.5 * (x_next[d] + target);
                    delta = std::max(delta, std::abs(mixed - x_next[d]));
                    scale = std::max(scale, std::abs(mixed));
                    x_next[d] = mixed;
                }
                if (!all_finite(x_next)) {
                    throw DivergenceError(n + 1, t_next);
                }
                if (delta <= kPolishTol * scale) {
                    break;
                }
            }
        }

        rhs(t_next, n + 1, x_next, {history.data() + (n + 1) * dim, dim});
        ++traj.stats.rhs_evaluations;
    }
    return traj;
}

} // namespace detail

Trajectory solve_forward(const Rhs& rhs, std::span<const double> x0,
                         double alpha, const Grid& grid,
                         const ControlSchedule& controls,
                         KernelNormalization norm, SchemeOptions options)
{
    if (controls.nodes() != grid.nodes()) {
        throw std::invalid_argument("control schedule does not cover the grid");
    }
    auto node_rhs = [&](double t, std::size_t node, std::span<const double> x,
                        std::span<double> dx) {
        rhs(t, x, controls.at(node), dx);
    };
    return detail::solve_nodes(node_rhs, x0, alpha, grid, norm, options);
}

Trajectory solve_backward(const CostateRhs& rhs, std::span<const double> terminal,
                          double alpha, const Grid& grid, const Trajectory& stored,
                          const ControlSchedule& controls,
                          KernelNormalization norm, SchemeOptions options)
{
    if (stored.grid.nodes() != grid.nodes() || controls.nodes() != grid.nodes()) {
        throw std::invalid_argument("stored trajectory/controls do not cover the grid");
    }
    const std::size_t last = grid.steps;
    // Reflected problem in s = t_f - t; state and control samples are read at
    // the mirrored node t_{N-k}.
    auto mirrored = [&](double s, std::size_t node, std::span<const double> lam,
                        std::span<double> out) {
        const std::size_t mirror = last - node;
        rhs(grid.t_f - s, lam, stored.node(mirror), controls.at(mirror), out);
    };
    Trajectory reflected = detail::solve_nodes(mirrored, terminal, alpha, grid,
                                               norm, options);

    Trajectory result;
    result.grid = grid;
    result.dim = reflected.dim;
    result.stats = reflected.stats;
    result.data.resize(reflected.data.size());
    for (std::size_t i = 0; i <= last; ++i) {
        auto src = reflected.node(last - i);
        std::copy(src.begin(), src.end(), result.node(i).begin());
    }
    return result;
}

} // namespace mpox
