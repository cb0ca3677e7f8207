#include "mpox/analysis.hpp"
#include "mpox/config.hpp"
#include "mpox/scenarios.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::string fmt(double v)
{
    std::array<char, 32> buf;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

struct CommonArgs {
    std::string config_path;
    double alpha = -1.0; // < 0 means "keep the config value"
    double t_f = 36.0;
    double step = 0.1;
    std::string out_dir;
    std::string scheme = "ab";
    std::string control_sign = "stationarity";
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_grid = true)
{
    cmd->add_option("--config", args.config_path, "key = value config file");
    cmd->add_option("--alpha", args.alpha, "fractional order override")
        ->check(CLI::Range(1e-6, 1.0));
    if (with_grid) {
        cmd->add_option("--tf", args.t_f, "horizon (months)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--step", args.step, "grid step")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out-dir", args.out_dir, "output directory");
        cmd->add_option("--scheme", args.scheme, "integration scheme")
            ->check(CLI::IsMember({"ab", "paper"}));
        cmd->add_option("--control-sign", args.control_sign,
                        "costate sign convention in the control update")
            ->check(CLI::IsMember({"stationarity", "paper"}));
    }
    cmd->add_flag("--verbose", args.verbose, "progress output on stderr");
}

mpox::RunConfig make_config(const CommonArgs& args)
{
    mpox::RunConfig cfg = args.config_path.empty()
                              ? mpox::RunConfig{}
                              : mpox::load_config(args.config_path);
    if (args.alpha > 0.0) {
        cfg.params.alpha = args.alpha;
    }
    return cfg;
}

mpox::RunOptions make_options(const CommonArgs& args,
                              const mpox::RunConfig& cfg)
{
    mpox::RunOptions options;
    if (!args.out_dir.empty()) {
        options.out_dir = args.out_dir;
    } else if (const char* env = std::getenv("MPOX_OUT_DIR")) {
        options.out_dir = env;
    }
    if (args.scheme == "paper") {
        options.scheme.nonlocal_term = mpox::NonlocalTerm::paper_literal;
        options.scheme.corrector_sign = mpox::CorrectorSign::paper_minus;
    }
    options.control_sign = args.control_sign == "paper"
                               ? mpox::ControlSign::paper_plus
                               : mpox::ControlSign::stationarity_minus;
    options.max_iters = cfg.max_iters;
    options.tolerance = cfg.tolerance;
    options.relaxation = cfg.relaxation;
    options.verbose = args.verbose;
    return options;
}

int cmd_run(const CommonArgs& args, const std::string& strategy)
{
    const mpox::RunConfig cfg = make_config(args);
    const mpox::Grid grid = mpox::Grid::make(args.t_f, args.step);
    const mpox::StrategySpec spec = mpox::StrategySpec::from_id(strategy);
    const mpox::RunArtifact artifact =
        mpox::run_strategy(spec, cfg, grid, make_options(args, cfg));
    std::cout << "strategy " << spec.id << ": J = "
              << fmt(artifact.summary.objective)
              << ", iterations = " << artifact.summary.iterations
              << ", converged = "
              << (artifact.summary.converged ? "true" : "false") << '\n'
              << "trajectory: " << artifact.trajectory_csv << '\n'
              << "controls:   " << artifact.controls_csv << '\n'
              << "summary:    " << artifact.summary_path << '\n';
    return artifact.summary.converged ? kExitOk : kExitSolver;
}

int cmd_compare(const CommonArgs& args, std::vector<std::string> strategies)
{
    const mpox::RunConfig cfg = make_config(args);
    const mpox::Grid grid = mpox::Grid::make(args.t_f, args.step);
    if (strategies.empty()) {
        strategies = {"uncontrolled", "1.1", "1.2", "1.3",
                      "2.1",          "2.2", "2.3", "3"};
    }
    std::vector<mpox::StrategySpec> specs;
    specs.reserve(strategies.size());
    for (const auto& id : strategies) {
        specs.push_back(mpox::StrategySpec::from_id(id));
    }
    const auto paths =
        mpox::compare_strategies(specs, cfg, grid, make_options(args, cfg));
    for (const auto& path : paths) {
        std::cout << path << '\n';
    }
    return kExitOk;
}

int cmd_analyze(const CommonArgs& args)
{
    const mpox::RunConfig cfg = make_config(args);
    const double alpha = cfg.params.alpha;

    const mpox::EquilibriumReport dfe =
        mpox::disease_free_equilibrium(cfg.params);
    std::cout << "disease-free equilibrium (residual "
              << fmt(dfe.residual) << "):\n ";
    for (double v : dfe.state) {
        std::cout << ' ' << fmt(v);
    }
    std::cout << '\n';

    const double r0 = mpox::basic_reproduction_number(cfg.params, 0.0, 0.0);
    std::cout << "R0 = " << fmt(r0) << '\n'
              << "next-generation spectral radius = "
              << fmt(mpox::ngm_spectral_radius(cfg.params,
                                               {0.0, 0.0, 0.0}))
              << '\n';

    const auto eigs = mpox::eigenvalues(
        mpox::jacobian_at(cfg.params, {0.0, 0.0, 0.0}, dfe.state));
    const mpox::StabilityVerdict verdict = mpox::stability_check(eigs, alpha);
    std::cout << "eigenvalues at the disease-free state:\n";
    for (const auto& lambda : eigs) {
        std::cout << "  " << fmt(lambda.real()) << (lambda.imag() < 0 ? " - " : " + ")
                  << fmt(std::abs(lambda.imag())) << "i\n";
    }
    std::cout << "stability margin = " << fmt(verdict.margin) << " ("
              << (verdict.stable ? "stable" : "unstable") << ")\n";

    const auto endemic =
        mpox::endemic_equilibrium(cfg.params, {0.0, 0.0, 0.0});
    if (endemic) {
        std::cout << "endemic equilibrium (residual "
                  << fmt(endemic->residual) << "):\n ";
        for (double v : endemic->state) {
            std::cout << ' ' << fmt(v);
        }
        std::cout << '\n';
    } else {
        std::cout << "no endemic equilibrium\n";
    }
    return kExitOk;
}

int cmd_certify(const CommonArgs& args)
{
    const mpox::RunConfig cfg = make_config(args);
    const mpox::EffectiveRates rates = mpox::effective_params(cfg.params);
    const double n_h0 = cfg.x0[0] + cfg.x0[1] + cfg.x0[2] + cfg.x0[3] + cfg.x0[4];
    const double n_r0 = cfg.x0[5] + cfg.x0[6] + cfg.x0[7];
    const auto bounds =
        mpox::CompartmentBounds::invariant_region(rates, n_h0, n_r0);
    const auto cert = mpox::contraction_certificate(
        cfg.params, {mpox::kControlUpperBound, mpox::kControlUpperBound,
                     mpox::kControlUpperBound},
        bounds, args.t_f, mpox::KernelNormalization{});
    std::cout << "horizon = " << fmt(cert.horizon) << '\n'
              << "prefactor = " << fmt(cert.prefactor) << '\n';
    for (std::size_t i = 0; i < cert.factors.size(); ++i) {
        std::cout << "kernel " << i + 1 << ": L = " << fmt(cert.lipschitz[i])
                  << ", factor = " << fmt(cert.factors[i]) << '\n';
    }
    std::cout << "contraction " << (cert.satisfied ? "satisfied" : "not satisfied")
              << '\n';
    return cert.satisfied ? kExitOk : kExitSolver;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fractional-order monkeypox transmission model: simulation, "
                 "analysis, and optimal control"};
    app.require_subcommand(1);

    CommonArgs run_args, compare_args, analyze_args, certify_args;
    std::string strategy = "3";
    std::vector<std::string> compare_ids;

    CLI::App* run = app.add_subcommand("run", "solve one control strategy");
    add_common(run, run_args);
    run->add_option("--strategy", strategy,
                    "strategy id (uncontrolled, 1.1-1.3, 2.1-2.3, 3)");

    CLI::App* compare =
        app.add_subcommand("compare", "run and compare several strategies");
    add_common(compare, compare_args);
    compare->add_option("--strategy", compare_ids,
                        "strategy ids (default: all eight)");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "equilibria, reproduction number, stability");
    add_common(analyze, analyze_args, false);

    CLI::App* certify = app.add_subcommand(
        "certify", "existence/contraction certificate over the horizon");
    add_common(certify, certify_args, true);

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            return cmd_run(run_args, strategy);
        }
        if (compare->parsed()) {
            return cmd_compare(compare_args, compare_ids);
        }
        if (analyze->parsed()) {
            return cmd_analyze(analyze_args);
        }
        return cmd_certify(certify_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const mpox::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}
