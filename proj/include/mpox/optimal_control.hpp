#pragma once

#include "mpox/frac_solver.hpp"
#include "mpox/model.hpp"

#include <array>
#include <functional>
#include <vector>

namespace mpox {

/// Quadratic effort weights of the running cost
/// E_h + I_h + (w1 u1^2 + w2 u2^2 + w3 u3^2) / 2.
struct Weights {
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 1.0;

    void validate() const;
};

/// Sign convention of the costate differences in the stationarity condition.
enum class ControlSign { stationarity_minus, paper_plus };

struct SweepOptions {
    std::size_t max_iters = 200;
    double tolerance = 1e-4;
    double relaxation = 0.5;
    std::array<bool, 3> strategy_mask{true, true, true};
    ControlSign control_sign = ControlSign::stationarity_minus;
    SchemeOptions scheme;
    KernelNormalization normalization;
    std::function<void(std::size_t iter, double change, double objective)> log;
};

struct OptimalSolution {
    Trajectory state;
    Trajectory costate;
    ControlSchedule controls;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;
};

/// Trapezoid-rule value of the objective along a trajectory.
double objective(const Trajectory& traj, const ControlSchedule& controls,
                 const Weights& w);

/// Right-sided fractional derivative of the costate: the running-cost
/// gradient (0,1,1,0,0,0,0,0) plus J(x,u)^T lambda.
Costate costate_rhs(const Costate& lambda, const State& x, const Control& u,
                    const EffectiveRates& r);

/// Pointwise stationarity update, clipped to [0, 0.9]; masked components
/// are forced to zero.
Control control_update(const Costate& lambda, const State& x, const Weights& w,
                       const std::array<bool, 3>& mask, ControlSign sign);

/// Forward-backward sweep: forward state solve, backward costate solve with
/// zero terminal data, relaxed control update, until the relative control
/// change drops below the tolerance.
OptimalSolution fbsm_solve(const ModelParams& p, const State& x0,
                           const Grid& grid, const Weights& w,
                           const SweepOptions& options);

} // namespace mpox
