// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits non-zero if any criterion fails.

#include "mpox/analysis.hpp"
#include "mpox/optimal_control.hpp"
#include "mpox/scenarios.hpp"
#include "mpox/special_functions.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mpox;
namespace fs = std::filesystem;

namespace {

const State kInitial{0.8, 0.1, 0.1, 0.0, 0.0, 0.8, 0.15, 0.05};

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail)
{
    std::printf("criterion %d (%s): %s%s%s\n", id, name,
                pass ? "PASS" : "FAIL", detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!pass) {
        ++g_failures;
    }
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Rhs model_rhs(const EffectiveRates& rates)
{
    return [&rates](double t, std::span<const double> x,
                    std::span<const double> u, std::span<double> dx) {
        State xs;
        std::copy(x.begin(), x.end(), xs.begin());
        const State g = rhs_controlled(t, xs, {u[0], u[1], u[2]}, rates);
        std::copy(g.begin(), g.end(), dx.begin());
    };
}

// Classical fixed-step RK4 for the order-1 reference solution.
std::vector<State> rk4_reference(const EffectiveRates& rates, const State& x0,
                                 double t_f, double h)
{
    const auto n = static_cast<std::size_t>(std::llround(t_f / h));
    std::vector<State> out;
    out.reserve(n + 1);
    out.push_back(x0);
    State x = x0;
    const Control u{0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = h * static_cast<double>(i);
        const State k1 = rhs_controlled(t, x, u, rates);
        State tmp;
        for (std::size_t c = 0; c < 8; ++c) tmp[c] = x[c] + 0.5 * h * k1[c];
        const State k2 = rhs_controlled(t + 0.5 * h, tmp, u, rates);
        for (std::size_t c = 0; c < 8; ++c) tmp[c] = x[c] + 0.5 * h * k2[c];
        const State k3 = rhs_controlled(t + 0.5 * h, tmp, u, rates);
        for (std::size_t c = 0; c < 8; ++c) tmp[c] = x[c] + h * k3[c];
        const State k4 = rhs_controlled(t + h, tmp, u, rates);
        for (std::size_t c = 0; c < 8; ++c) {
            x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        out.push_back(x);
    }
    return out;
}

void criterion_1()
{
    const ModelParams p; // order 1
    const EffectiveRates rates = effective_params(p);
    const Grid grid = Grid::make(36.0, 0.01);
    const Rhs rhs = model_rhs(rates);
    const Trajectory traj =
        solve_forward(rhs, kInitial, 1.0, grid,
                      ControlSchedule::zeros(grid.nodes()), {}, {});
    const auto reference = rk4_reference(rates, kInitial, 36.0, 0.001);

    double worst = 0.0;
    for (std::size_t i = 0; i <= grid.steps; ++i) {
        const State& want = reference[i * 10];
        for (std::size_t c = 0; c < 8; ++c) {
            worst = std::max(worst, std::abs(traj.node(i)[c] - want[c]));
        }
    }
    report(1, "order-1 classical equivalence", worst <= 1e-3,
           "max state error " + fmt(worst));
}

void criterion_2()
{
    // Scalar relaxation dx = -x of order 1/2 with unit normalization.
    // Laplace solution: x(t) = [B/(B+(1-a))] E_a(-a t^a / (B+(1-a)))
    //                        = (2/3) E_{1/2}(-sqrt(t)/3).
    const Rhs rhs = [](double, std::span<const double> x,
                       std::span<const double>, std::span<double> dx) {
        dx[0] = -x[0];
    };
    const Grid grid = Grid::make(5.0, 0.001);
    const double x0[] = {1.0};
    const Trajectory traj = solve_forward(
        rhs, x0, 0.5, grid, ControlSchedule::zeros(grid.nodes()), {}, {});

    double worst = 0.0;
    for (std::size_t i = 500; i <= grid.steps; ++i) { // t in [0.5, 5]
        const double t = grid.time(i);
        const double want =
            (2.0 / 3.0) * ml_one(0.5, -0.5 * std::sqrt(t) / 1.5);
        worst = std::max(worst, std::abs(traj.node(i)[0] - want));
    }
    report(2, "half-order relaxation oracle", worst <= 2e-2,
           "max error " + fmt(worst));
}

void criterion_3()
{
    // Hand derivation at the default rates, order 1:
    //   k1 = alpha_1 + alpha_2 + mu_h = 0.3 + 2 + 0.02 = 2.32
    //   k2 = mu_h + delta_h + gamma = 0.02 + 0.2 + 1/21 = 0.2676190476...
    //   R0 = alpha_1 beta_2 / (k1 k2) = 2.7 / 0.6208761904... = 4.3486930911...
    const double oracle = 2.7 / (2.32 * (0.02 + 0.2 + 1.0 / 21.0));
    const double got = basic_reproduction_number(ModelParams{}, 0.0, 0.0);
    report(3, "reproduction number", std::abs(got - oracle) <= 1e-3,
           "got " + fmt(got) + ", oracle " + fmt(oracle));
}

void criterion_4()
{
    bool pass = true;
    std::string detail;
    try {
        // Below-threshold set: both transmission loops weakened.
        ModelParams quiet;
        quiet.beta_2 = 0.5;
        quiet.beta_3 = 0.5;
        const auto dfe_quiet = disease_free_equilibrium(quiet);
        const auto eig_quiet =
            eigenvalues(jacobian_at(quiet, {0, 0, 0}, dfe_quiet.state));
        const bool stable = stability_check(eig_quiet, 1.0).stable;
        const bool below = basic_reproduction_number(quiet, 0, 0) < 1.0;

        const auto dfe = disease_free_equilibrium(ModelParams{});
        const auto eig =
            eigenvalues(jacobian_at(ModelParams{}, {0, 0, 0}, dfe.state));
        const bool unstable = !stability_check(eig, 1.0).stable;

        pass = stable && below && unstable;
        detail = std::string("stable set: ") + (stable ? "stable" : "NOT stable") +
                 ", default set: " + (unstable ? "unstable" : "NOT unstable");
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    report(4, "stability pairing", pass, detail);
}

void criterion_5()
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(123456);
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    std::uniform_real_distribution<double> fill(0.05, 1.0);
    std::uniform_real_distribution<double> level(0.2, 0.95);
    const double alphas[] = {0.7, 0.8, 0.9, 1.0};

    double min_seen = 0.0;
    double bound_excess = 0.0;
    bool pass = true;
    std::string detail;
    const Grid grid = Grid::make(36.0, 0.05);

    for (int draw = 0; draw < 200 && pass; ++draw) {
        ModelParams p;
        p.theta_h *= scale(rng);
        p.theta_r *= scale(rng);
        p.beta_1 *= scale(rng);
        p.beta_2 *= scale(rng);
        p.beta_3 *= scale(rng);
        p.alpha_1 *= scale(rng);
        p.alpha_2 *= scale(rng);
        p.alpha_3 *= scale(rng);
        p.phi *= scale(rng);
        p.tau *= scale(rng);
        p.gamma *= scale(rng);
        p.mu_h *= scale(rng);
        p.mu_r *= scale(rng);
        p.delta_h *= scale(rng);
        p.delta_r *= scale(rng);
        p.alpha = alphas[draw % 4];
        const EffectiveRates rates = effective_params(p);

        // Initial populations inside the invariant region.
        const double bound_h = rates.theta_h / rates.mu_h;
        const double bound_r = rates.theta_r / rates.mu_r;
        State x0;
        double wsum = 0.0;
        std::array<double, 8> weights;
        for (double& w : weights) {
            w = fill(rng);
        }
        wsum = weights[0] + weights[1] + weights[2] + weights[3] + weights[4];
        const double n_h = level(rng) * bound_h;
        for (std::size_t c = 0; c < 5; ++c) {
            x0[c] = n_h * weights[c] / wsum;
        }
        wsum = weights[5] + weights[6] + weights[7];
        const double n_r = level(rng) * bound_r;
        for (std::size_t c = 5; c < 8; ++c) {
            x0[c] = n_r * weights[c] / wsum;
        }

        try {
            const Trajectory traj = solve_forward(
                model_rhs(rates), x0, p.alpha, grid,
                ControlSchedule::zeros(grid.nodes()), {}, {});
            for (std::size_t i = 0; i <= grid.steps; ++i) {
                const auto x = traj.node(i);
                double nh = 0.0, nr = 0.0;
                for (std::size_t c = 0; c < 8; ++c) {
                    min_seen = std::min(min_seen, x[c]);
                    (c < 5 ? nh : nr) += x[c];
                }
                bound_excess = std::max(bound_excess,
                                        std::max(nh - bound_h, nr - bound_r));
            }
            pass = min_seen >= -1e-8 && bound_excess <= 1e-6;
            if (!pass) {
                detail = "draw " + std::to_string(draw);
            }
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("draw ") + std::to_string(draw) + ": " +
                     e.what();
        }
    }
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    pass = pass && elapsed <= 120.0;
    report(5, "positivity and boundedness", pass,
           detail + (detail.empty() ? "" : "; ") + "min " + fmt(min_seen) +
               ", bound excess " + fmt(bound_excess) + ", " + fmt(elapsed) +
               " s");
}

void criterion_6()
{
    std::mt19937 rng(987);
    std::uniform_real_distribution<double> dx(0.05, 1.2);
    std::uniform_real_distribution<double> dl(-2.0, 2.0);
    std::uniform_real_distribution<double> du(0.0, 0.9);
    const EffectiveRates r = effective_params(ModelParams{});
    const Weights w;

    double worst_costate = 0.0;
    double worst_jacobian = 0.0;
    const double eps = 1e-6;

    for (int trial = 0; trial < 20; ++trial) {
        State x;
        for (double& v : x) {
            v = dx(rng);
        }
        Costate lambda;
        for (double& v : lambda) {
            v = dl(rng);
        }
        const Control u{du(rng), du(rng), du(rng)};

        auto hamiltonian = [&](const State& xs) {
            const State g = rhs_controlled(0.0, xs, u, r);
            double h = xs[kEh] + xs[kIh] +
                       0.5 * (w.w1 * u[0] * u[0] + w.w2 * u[1] * u[1] +
                              w.w3 * u[2] * u[2]);
            for (std::size_t i = 0; i < 8; ++i) {
                h += lambda[i] * g[i];
            }
            return h;
        };

        const Costate analytic = costate_rhs(lambda, x, u, r);
        const auto jac = jacobian_at(r, u, x);
        for (std::size_t i = 0; i < 8; ++i) {
            State hi = x, lo = x;
            hi[i] += eps;
            lo[i] -= eps;
            const double fd =
                (hamiltonian(hi) - hamiltonian(lo)) / (2.0 * eps);
            worst_costate = std::max(worst_costate,
                                     std::abs(analytic[i] - fd));

            const State ghi = rhs_controlled(0.0, hi, u, r);
            const State glo = rhs_controlled(0.0, lo, u, r);
            for (std::size_t row = 0; row < 8; ++row) {
                const double jfd = (ghi[row] - glo[row]) / (2.0 * eps);
                worst_jacobian = std::max(
                    worst_jacobian,
                    std::abs(jac(static_cast<Eigen::Index>(row),
                                 static_cast<Eigen::Index>(i)) -
                             jfd));
            }
        }
    }
    report(6, "gradient consistency",
           worst_costate <= 1e-5 && worst_jacobian <= 1e-5,
           "costate gap " + fmt(worst_costate) + ", jacobian gap " +
               fmt(worst_jacobian));
}

struct StrategyResult {
    double objective;
    double peak_i_h;
};

StrategyResult run_masked(const std::array<bool, 3>& mask)
{
    ModelParams p;
    p.alpha = 0.9;
    const Grid grid = Grid::make(36.0, 0.1);
    SweepOptions options;
    options.strategy_mask = mask;
    const OptimalSolution sol =
        fbsm_solve(p, kInitial, grid, Weights{}, options);
    double peak = 0.0;
    for (std::size_t i = 0; i <= grid.steps; ++i) {
        peak = std::max(peak, sol.state.node(i)[kIh]);
    }
    return {sol.objective, peak};
}

void criterion_7()
{
    const auto start = std::chrono::steady_clock::now();
    const StrategyResult none = run_masked({false, false, false});
    const StrategyResult s11 = run_masked({true, false, false});
    const StrategyResult s12 = run_masked({false, true, false});
    const StrategyResult s13 = run_masked({false, false, true});
    const StrategyResult s21 = run_masked({true, true, false});
    const StrategyResult s3 = run_masked({true, true, true});
    const double best_single =
        std::min(s11.objective, std::min(s12.objective, s13.objective));

    const bool ordering = s3.objective <= s21.objective &&
                          s21.objective <= best_single &&
                          best_single <= none.objective;
    const bool peaks = s11.peak_i_h < none.peak_i_h &&
                       s12.peak_i_h < none.peak_i_h &&
                       s13.peak_i_h < none.peak_i_h &&
                       s21.peak_i_h < none.peak_i_h &&
                       s3.peak_i_h < none.peak_i_h;
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    report(7, "strategy ordering",
           ordering && peaks && elapsed <= 300.0,
           "J: " + fmt(s3.objective) + " <= " + fmt(s21.objective) +
               " <= " + fmt(best_single) + " <= " + fmt(none.objective) +
               ", " + fmt(elapsed) + " s");
}

void criterion_8()
{
    ModelParams p;
    p.alpha = 0.9;
    const Grid grid = Grid::make(36.0, 0.1);

    SweepOptions off;
    off.strategy_mask = {false, false, false};
    const double j_unc =
        fbsm_solve(p, kInitial, grid, Weights{}, off).objective;

    Weights heavy;
    heavy.w1 = heavy.w2 = heavy.w3 = 1e6;
    const OptimalSolution sol =
        fbsm_solve(p, kInitial, grid, heavy, SweepOptions{});
    double max_u = 0.0;
    for (const auto& u : sol.controls.values) {
        for (double v : u) {
            max_u = std::max(max_u, v);
        }
    }
    // Compare state-cost parts: with negligible controls the effort term is
    // zero to first order.
    const double rel = std::abs(sol.objective - j_unc) / j_unc;
    report(8, "large-weight limit",
           sol.converged && max_u < 1e-3 && rel <= 1e-3,
           "max control " + fmt(max_u) + ", relative objective gap " +
               fmt(rel));
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(MPOX_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void criterion_9()
{
    bool pass = true;
    std::string detail;
    const fs::path base = fs::temp_directory_path() / "mpox_acceptance";
    fs::remove_all(base);

    const std::string common = "run --strategy 3 --alpha 0.9 --tf 36 --step 0.1";
    const fs::path a = base / "a", b = base / "b";
    if (run_cli(common + " --out-dir " + a.string()) != 0 ||
        run_cli(common + " --out-dir " + b.string()) != 0) {
        pass = false;
        detail = "run invocation failed";
    } else {
        for (const char* file : {"3_trajectory.csv", "3_controls.csv",
                                 "3_summary.txt"}) {
            if (slurp(a / file) != slurp(b / file) || slurp(a / file).empty()) {
                pass = false;
                detail = std::string("mismatch in ") + file;
            }
        }
    }

    const int compare_rc =
        run_cli("compare --alpha 0.9 --tf 36 --step 0.1 --out-dir " +
                (base / "cmp").string());
    if (compare_rc != 0) {
        pass = false;
        detail += std::string(detail.empty() ? "" : "; ") +
                  "compare exit code " + std::to_string(compare_rc);
    }
    report(9, "determinism and comparison", pass,
           detail.empty() ? "byte-identical runs, compare exit 0" : detail);
}

} // namespace

int main()
{
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
