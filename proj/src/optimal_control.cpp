#include "mpox/optimal_control.hpp"

#include "mpox/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpox {

void Weights::validate() const
{
    if (!(w1 > 0.0) || !(w2 > 0.0) || !(w3 > 0.0)) {
        throw std::invalid_argument("effort weights must be positive");
    }
}

double objective(const Trajectory& traj, const ControlSchedule& controls,
                 const Weights& w)
{
    if (traj.dim != 8 || controls.nodes() != traj.grid.nodes()) {
        throw std::invalid_argument("objective needs a state trajectory and "
                                    "node-aligned controls");
    }
    auto integrand = [&](std::size_t i) {
        const auto x = traj.node(i);
        const auto& u = controls.at(i);
        return x[kEh] + x[kIh] +
               0.5 * (w.w1 * u[0] * u[0] + w.w2 * u[1] * u[1] +
                      w.w3 * u[2] * u[2]);
    };
    double sum = 0.5 * (integrand(0) + integrand(traj.grid.steps));
    for (std::size_t i = 1; i < traj.grid.steps; ++i) {
        sum += integrand(i);
    }
    return sum * traj.grid.h;
}

Costate costate_rhs(const Costate& lambda, const State& x, const Control& u,
                    const EffectiveRates& r)
{
    const auto j = jacobian_at(r, u, x);
    Costate out{0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t col = 0; col < 8; ++col) {
        double acc = 0.0;
        for (std::size_t row = 0; row < 8; ++row) {
            acc += j(static_cast<Eigen::Index>(row),
                     static_cast<Eigen::Index>(col)) *
                   lambda[row];
        }
        out[col] += acc;
    }
    return out;
}

Control control_update(const Costate& lambda, const State& x, const Weights& w,
                       const std::array<bool, 3>& mask, ControlSign sign)
{
    const double s = sign == ControlSign::stationarity_minus ? -1.0 : 1.0;
    auto clip = [](double v) {
        return std::clamp(v, 0.0, kControlUpperBound);
    };
    Control u{0.0, 0.0, 0.0};
    if (mask[0]) {
        u[0] = clip((lambda[kSh] + s * lambda[kRh]) * x[kSh] / w.w1);
    }
    if (mask[1]) {
        u[1] = clip((lambda[kIh] + s * lambda[kRh]) * x[kIh] / w.w2);
    }
    if (mask[2]) {
        u[2] = clip((lambda[kIh] + s * lambda[kQh]) * x[kIh] / w.w3);
    }
    return u;
}

OptimalSolution fbsm_solve(const ModelParams& p, const State& x0,
                           const Grid& grid, const Weights& w,
                           const SweepOptions& options)
{
    w.validate();
    const EffectiveRates rates = effective_params(p);
    if (!(options.relaxation > 0.0) || options.relaxation > 1.0) {
        throw std::invalid_argument("relaxation must lie in (0, 1]");
    }
    if (!(options.tolerance > 0.0) || options.max_iters == 0) {
        throw std::invalid_argument("sweep needs a positive tolerance and at "
                                    "least one iteration");
    }

    const Rhs state_rhs = [&rates](double t, std::span<const double> x,
                                   std::span<const double> u,
                                   std::span<double> dx) {
        State xs;
        std::copy(x.begin(), x.end(), xs.begin());
        const Control us{u[0], u[1], u[2]};
        const State g = rhs_controlled(t, xs, us, rates);
        std::copy(g.begin(), g.end(), dx.begin());
    };
    const CostateRhs adjoint_rhs =
        [&rates](double, std::span<const double> lambda,
                 std::span<const double> x, std::span<const double> u,
                 std::span<double> out) {
            Costate ls;
            std::copy(lambda.begin(), lambda.end(), ls.begin());
            State xs;
            std::copy(x.begin(), x.end(), xs.begin());
            const Control us{u[0], u[1], u[2]};
            const Costate g = costate_rhs(ls, xs, us, rates);
            std::copy(g.begin(), g.end(), out.begin());
        };

    OptimalSolution sol;
    sol.controls = ControlSchedule::zeros(grid.nodes());
    const Costate terminal{};

    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        sol.state = solve_forward(state_rhs, x0, p.alpha, grid, sol.controls,
                                  options.normalization, options.scheme);
        sol.costate =
            solve_backward(adjoint_rhs, terminal, p.alpha, grid, sol.state,
                           sol.controls, options.normalization, options.scheme);

        double max_change = 0.0;
        double max_control = 0.0;
        ControlSchedule next = sol.controls;
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const auto xs = sol.state.node(i);
            const auto ls = sol.costate.node(i);
            State x;
            std::copy(xs.begin(), xs.end(), x.begin());
            Costate lambda;
            std::copy(ls.begin(), ls.end(), lambda.begin());
            const Control cand = control_update(lambda, x, w,
                                                options.strategy_mask,
                                                options.control_sign);
            for (std::size_t c = 0; c < 3; ++c) {
                const double mixed = (1.0 - options.relaxation) *
                                         sol.controls.at(i)[c] +
                                     options.relaxation * cand[c];
                max_change =
                    std::max(max_change,
                             std::abs(mixed - sol.controls.at(i)[c]));
                max_control = std::max(max_control, std::abs(mixed));
                next.values[i][c] = mixed;
            }
        }
        sol.controls = std::move(next);
        sol.iterations = iter;

        const double change = max_change / std::max(max_control, 1e-3);
        sol.objective = objective(sol.state, sol.controls, w);
        sol.objective_history.push_back(sol.objective);
        if (options.log) {
            options.log(iter, change, sol.objective);
        }
        if (change <= options.tolerance) {
            sol.converged = true;
            break;
        }
    }

    // Final forward pass so the reported state matches the final controls.
    sol.state = solve_forward(state_rhs, x0, p.alpha, grid, sol.controls,
                              options.normalization, options.scheme);
    sol.costate =
        solve_backward(adjoint_rhs, terminal, p.alpha, grid, sol.state,
                       sol.controls, options.normalization, options.scheme);
    sol.objective = objective(sol.state, sol.controls, w);
    return sol;
}

} // namespace mpox
