#pragma once

#include "mpox/config.hpp"
#include "mpox/frac_solver.hpp"
#include "mpox/model.hpp"
#include "mpox/optimal_control.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpox {

/// Raised when an emitted trajectory fails the positivity/bounds scan.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A named control strategy: which of (u1, u2, u3) the sweep may use.
struct StrategySpec {
    std::string id;
    std::array<bool, 3> mask{false, false, false};

    /// Maps the strategy taxonomy: "1.1" (1,0,0), "1.2" (0,1,0),
    /// "1.3" (0,0,1), "2.1" (1,1,0), "2.2" (1,0,1), "2.3" (0,1,1),
    /// "3" (1,1,1), "uncontrolled" (0,0,0).
    static StrategySpec from_id(const std::string& id);
    bool controlled() const { return mask[0] || mask[1] || mask[2]; }
};

/// Headline numbers of a finished run.
struct RunSummary {
    double objective = 0.0;
    double r0 = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    double stability_margin = 0.0;
    double peak_i_h = 0.0;
    double peak_e_h = 0.0;
    double final_r_h = 0.0;
};

struct RunArtifact {
    std::string trajectory_csv;
    std::string controls_csv;
    std::string summary_path;
    std::vector<std::string> plot_paths;
    RunSummary summary;
};

struct RunOptions {
    std::string out_dir = ".";
    SchemeOptions scheme;
    KernelNormalization normalization;
    ControlSign control_sign = ControlSign::stationarity_minus;
    std::size_t max_iters = 200;
    double tolerance = 1e-4;
    double relaxation = 0.5;
    bool verbose = false;
    bool plots = true;
};

/// Full in-memory result of a strategy run, for callers that need the
/// trajectory itself (comparisons, tests).
struct RunOutcome {
    RunArtifact artifact;
    Trajectory trajectory;
    ControlSchedule controls;
};

/// Solve one strategy (sweep for controlled masks, plain forward solve for
/// "uncontrolled"), validate every node, and write trajectory/controls CSVs,
/// a summary file, and per-compartment plots under options.out_dir.
RunOutcome run_strategy_detail(const StrategySpec& spec, const RunConfig& cfg,
                               const Grid& grid, const RunOptions& options);
RunArtifact run_strategy(const StrategySpec& spec, const RunConfig& cfg,
                         const Grid& grid, const RunOptions& options);

/// Run every spec (concurrently), then write a comparison table
/// (strategy x {J, peak I_h, peak E_h, final R_h}) and one multi-series plot
/// per compartment. Returns the table path followed by the plot paths.
std::vector<std::string> compare_strategies(const std::vector<StrategySpec>& specs,
                                            const RunConfig& cfg,
                                            const Grid& grid,
                                            const RunOptions& options);

/// Write `t,S_h,E_h,I_h,Q_h,R_h,S_r,E_r,I_r,u1,u2,u3` rows with shortest
/// round-trip decimal formatting.
void emit_csv(const Trajectory& traj, const ControlSchedule& controls,
              const std::string& path);

} // namespace mpox
