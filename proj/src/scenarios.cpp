#include "mpox/scenarios.hpp"

#include "mpox/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace mpox {

namespace {

namespace fs = std::filesystem;

constexpr std::array<const char*, 8> kCompartmentNames = {
    "S_h", "E_h", "I_h", "Q_h", "R_h", "S_r", "E_r", "I_r"};

std::string format_double(double v)
{
    std::array<char, 32> buf;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string sanitize(const std::string& id)
{
    std::string out = id;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' &&
            c != '-' && c != '_') {
            c = '_';
        }
    }
    return out;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::ios_base::failure("cannot open output file '" + path + "'");
    }
    return out;
}

struct Series {
    std::string label;
    std::vector<double> values;
};

/// Minimal static line chart; deterministic byte output.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<double>& times,
                     const std::vector<Series>& series)
{
    constexpr double kWidth = 760.0, kHeight = 480.0;
    constexpr double kLeft = 64.0, kRight = 600.0;
    constexpr double kTop = 40.0, kBottom = 432.0;
    static const std::array<const char*, 8> palette = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    double lo = series.front().values.front();
    double hi = lo;
    for (const auto& s : series) {
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi - lo < 1e-12) {
        hi = lo + 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double t0 = times.front(), t1 = times.back();

    auto xpix = [&](double t) {
        return kLeft + (t - t0) / (t1 - t0) * (kRight - kLeft);
    };
    auto ypix = [&](double v) {
        return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop);
    };

    std::ofstream out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << format_double((kLeft + kRight) / 2)
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\""
        << kRight << "\" y2=\"" << kBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
        << "\" y2=\"" << kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kLeft << "\" y=\"452\" font-family=\"sans-serif\" "
           "font-size=\"12\">t = "
        << format_double(t0) << "</text>\n";
    out << "<text x=\"" << kRight
        << "\" y=\"452\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">t = "
        << format_double(t1) << "</text>\n";
    out << "<text x=\"8\" y=\"" << kTop + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_double(hi) << "</text>\n";
    out << "<text x=\"8\" y=\"" << kBottom
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_double(lo) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % palette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < times.size(); ++i) {
            out << format_double(xpix(times[i])) << ","
                << format_double(ypix(series[s].values[i]));
            if (i + 1 < times.size()) {
                out << " ";
            }
        }
        out << "\"/>\n";
        const double ly = kTop + 18.0 * static_cast<double>(s);
        out << "<line x1=\"616\" y1=\"" << format_double(ly - 4)
            << "\" x2=\"640\" y2=\"" << format_double(ly - 4) << "\" stroke=\""
            << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"646\" y=\"" << format_double(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) {
        throw std::ios_base::failure("write failed for '" + path + "'");
    }
}

std::vector<double> grid_times(const Grid& grid)
{
    std::vector<double> t(grid.nodes());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = grid.time(i);
    }
    return t;
}

void ensure_out_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::ios_base::failure("cannot create output directory '" + dir +
                                     "': " + ec.message());
    }
}

} // namespace

StrategySpec StrategySpec::from_id(const std::string& id)
{
    static const std::map<std::string, std::array<bool, 3>> table = {
        {"uncontrolled", {false, false, false}},
        {"1.1", {true, false, false}},
        {"1.2", {false, true, false}},
        {"1.3", {false, false, true}},
        {"2.1", {true, true, false}},
        {"2.2", {true, false, true}},
        {"2.3", {false, true, true}},
        {"3", {true, true, true}},
    };
    const auto it = table.find(id);
    if (it == table.end()) {
        throw ConfigError("unknown strategy id '" + id + "'");
    }
    return StrategySpec{id, it->second};
}

void emit_csv(const Trajectory& traj, const ControlSchedule& controls,
              const std::string& path)
{
    if (traj.dim != 8 || controls.nodes() != traj.grid.nodes()) {
        throw std::invalid_argument("emit_csv needs an 8-compartment "
                                    "trajectory with node-aligned controls");
    }
    std::ofstream out = open_output(path);
    out << "t,S_h,E_h,I_h,Q_h,R_h,S_r,E_r,I_r,u1,u2,u3\n";
    for (std::size_t i = 0; i < traj.grid.nodes(); ++i) {
        out << format_double(traj.grid.time(i));
        const auto x = traj.node(i);
        for (double v : x) {
            out << ',' << format_double(v);
        }
        for (double v : controls.at(i)) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
    if (!out) {
        throw std::ios_base::failure("write failed for '" + path + "'");
    }
}

RunOutcome run_strategy_detail(const StrategySpec& spec, const RunConfig& cfg,
                               const Grid& grid, const RunOptions& options)
{
    const EffectiveRates rates = effective_params(cfg.params);
    ensure_out_dir(options.out_dir);

    RunOutcome outcome;
    if (spec.controlled()) {
        SweepOptions sweep;
        sweep.max_iters = options.max_iters;
        sweep.tolerance = options.tolerance;
        sweep.relaxation = options.relaxation;
        sweep.strategy_mask = spec.mask;
        sweep.control_sign = options.control_sign;
        sweep.scheme = options.scheme;
        sweep.normalization = options.normalization;
        if (options.verbose) {
            sweep.log = [&spec](std::size_t iter, double change,
                                double objective_value) {
                std::fprintf(stderr,
                             "[%s] sweep iter %zu: change %.3e, J %.6f\n",
                             spec.id.c_str(), iter, change, objective_value);
            };
        }
        OptimalSolution sol = fbsm_solve(cfg.params, cfg.x0, grid, cfg.weights,
                                         sweep);
        outcome.trajectory = std::move(sol.state);
        outcome.controls = std::move(sol.controls);
        outcome.artifact.summary.objective = sol.objective;
        outcome.artifact.summary.iterations = sol.iterations;
        outcome.artifact.summary.converged = sol.converged;
    } else {
        const Rhs rhs = [&rates](double t, std::span<const double> x,
                                 std::span<const double> u,
                                 std::span<double> dx) {
            State xs;
            std::copy(x.begin(), x.end(), xs.begin());
            const State g = rhs_controlled(t, xs, {u[0], u[1], u[2]}, rates);
            std::copy(g.begin(), g.end(), dx.begin());
        };
        outcome.controls = ControlSchedule::zeros(grid.nodes());
        outcome.trajectory =
            solve_forward(rhs, cfg.x0, cfg.params.alpha, grid, outcome.controls,
                          options.normalization, options.scheme);
        outcome.artifact.summary.objective =
            objective(outcome.trajectory, outcome.controls, cfg.weights);
        outcome.artifact.summary.converged = true;
    }

    RunSummary& summary = outcome.artifact.summary;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const auto x = outcome.trajectory.node(i);
        State xs;
        std::copy(x.begin(), x.end(), xs.begin());
        const ValidationReport report = validate_state(xs, 1e-8, rates, cfg.x0);
        if (!report.ok()) {
            std::string detail;
            for (const auto& v : report.violations) {
                detail += "; " + v;
            }
            throw ValidationError("strategy " + spec.id + ": state at t = " +
                                  format_double(grid.time(i)) +
                                  " fails validation" + detail);
        }
        summary.peak_i_h = std::max(summary.peak_i_h, xs[kIh]);
        summary.peak_e_h = std::max(summary.peak_e_h, xs[kEh]);
        if (i == grid.steps) {
            summary.final_r_h = xs[kRh];
        }
    }

    summary.r0 = basic_reproduction_number(cfg.params, 0.0, 0.0);
    const EquilibriumReport dfe = disease_free_equilibrium(cfg.params);
    const auto eigs =
        eigenvalues(jacobian_at(rates, Control{0.0, 0.0, 0.0}, dfe.state));
    summary.stability_margin = stability_check(eigs, cfg.params.alpha).margin;

    const std::string prefix =
        (fs::path(options.out_dir) / sanitize(spec.id)).string();
    outcome.artifact.trajectory_csv = prefix + "_trajectory.csv";
    outcome.artifact.controls_csv = prefix + "_controls.csv";
    outcome.artifact.summary_path = prefix + "_summary.txt";

    emit_csv(outcome.trajectory, outcome.controls,
             outcome.artifact.trajectory_csv);

    {
        std::ofstream out = open_output(outcome.artifact.controls_csv);
        out << "t,u1,u2,u3\n";
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            out << format_double(grid.time(i));
            for (double v : outcome.controls.at(i)) {
                out << ',' << format_double(v);
            }
            out << '\n';
        }
    }
    {
        std::ofstream out = open_output(outcome.artifact.summary_path);
        out << "strategy = " << spec.id << '\n'
            << "objective = " << format_double(summary.objective) << '\n'
            << "r0 = " << format_double(summary.r0) << '\n'
            << "iterations = " << summary.iterations << '\n'
            << "converged = " << (summary.converged ? "true" : "false") << '\n'
            << "stability_margin = " << format_double(summary.stability_margin)
            << '\n'
            << "peak_i_h = " << format_double(summary.peak_i_h) << '\n'
            << "peak_e_h = " << format_double(summary.peak_e_h) << '\n'
            << "final_r_h = " << format_double(summary.final_r_h) << '\n';
    }

    if (options.plots) {
        const std::vector<double> times = grid_times(grid);
        std::vector<Series> series;
        for (std::size_t c = 0; c < 8; ++c) {
            Series s;
            s.label = kCompartmentNames[c];
            s.values.resize(grid.nodes());
            for (std::size_t i = 0; i < grid.nodes(); ++i) {
                s.values[i] = outcome.trajectory.node(i)[c];
            }
            series.push_back(std::move(s));
        }
        const std::string plot = prefix + "_trajectory.svg";
        write_svg_chart(plot, "Strategy " + spec.id, times, series);
        outcome.artifact.plot_paths.push_back(plot);
    }
    return outcome;
}

RunArtifact run_strategy(const StrategySpec& spec, const RunConfig& cfg,
                         const Grid& grid, const RunOptions& options)
{
    return run_strategy_detail(spec, cfg, grid, options).artifact;
}

std::vector<std::string> compare_strategies(const std::vector<StrategySpec>& specs,
                                            const RunConfig& cfg,
                                            const Grid& grid,
                                            const RunOptions& options)
{
    if (specs.size() < 2) {
        throw std::invalid_argument("compare needs at least two strategies");
    }
    ensure_out_dir(options.out_dir);

    std::vector<std::future<RunOutcome>> futures;
    futures.reserve(specs.size());
    for (const auto& spec : specs) {
        futures.push_back(std::async(std::launch::async, [&, spec] {
            return run_strategy_detail(spec, cfg, grid, options);
        }));
    }
    std::vector<RunOutcome> outcomes;
    outcomes.reserve(specs.size());
    for (auto& f : futures) {
        outcomes.push_back(f.get());
    }

    std::vector<std::string> paths;
    const std::string table_path =
        (fs::path(options.out_dir) / "comparison.csv").string();
    {
        std::ofstream out = open_output(table_path);
        out << "strategy,objective,peak_I_h,peak_E_h,final_R_h\n";
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const RunSummary& s = outcomes[i].artifact.summary;
            out << specs[i].id << ',' << format_double(s.objective) << ','
                << format_double(s.peak_i_h) << ','
                << format_double(s.peak_e_h) << ','
                << format_double(s.final_r_h) << '\n';
        }
    }
    paths.push_back(table_path);

    const std::vector<double> times = grid_times(grid);
    for (std::size_t c = 0; c < 8; ++c) {
        std::vector<Series> series;
        for (std::size_t s = 0; s < specs.size(); ++s) {
            Series one;
            one.label = specs[s].id;
            one.values.resize(grid.nodes());
            for (std::size_t i = 0; i < grid.nodes(); ++i) {
                one.values[i] = outcomes[s].trajectory.node(i)[c];
            }
            series.push_back(std::move(one));
        }
        const std::string path =
            (fs::path(options.out_dir) /
             ("compare_" + std::string(kCompartmentNames[c]) + ".svg"))
                .string();
        write_svg_chart(path, kCompartmentNames[c], times, series);
        paths.push_back(path);
    }
    return paths;
}

} // namespace mpox
