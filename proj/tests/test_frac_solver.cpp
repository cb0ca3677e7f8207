#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpox/frac_solver.hpp"
#include "mpox/special_functions.hpp"

#include <cmath>
#include <vector>

using namespace mpox;

namespace {

const Rhs kDecay = [](double, std::span<const double> x,
                      std::span<const double>, std::span<double> dx) {
    dx[0] = -x[0];
};

Trajectory solve_decay(double alpha, const Grid& grid,
                       KernelNormalization norm = {}, SchemeOptions opts = {})
{
    const double x0[] = {1.0};
    return solve_forward(kDecay, x0, alpha, grid,
                         ControlSchedule::zeros(grid.nodes()), norm, opts);
}

} // namespace

TEST_CASE("grid construction")
{
    const Grid g = Grid::make(36.0, 0.1);
    CHECK(g.steps == 360);
    CHECK(g.nodes() == 361);
    CHECK(g.time(0) == 0.0);
    CHECK(g.time(360) == doctest::Approx(36.0).epsilon(1e-14));

    CHECK_THROWS_AS(Grid::make(36.0, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(-1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(0.1, 0.1), std::invalid_argument); // one step
}

TEST_CASE("kernel normalization variants")
{
    KernelNormalization unit;
    CHECK(unit.value(0.3) == 1.0);
    CHECK(unit.value(1.0) == 1.0);

    KernelNormalization ab{KernelVariant::ab_original};
    CHECK(ab.value(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ab.value(0.5) ==
          doctest::Approx(0.5 + 0.5 / gamma_fn(0.5)).epsilon(1e-14));
}

TEST_CASE("predictor weights telescope")
{
    for (double alpha : {0.3, 0.62, 1.0}) {
        for (std::size_t n : {std::size_t{0}, std::size_t{5}, std::size_t{40}}) {
            double sum = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                const double b = weight_b(j, n, alpha);
                CHECK(b >= 0.0);
                sum += b;
            }
            CHECK(sum == doctest::Approx(std::pow(n + 1.0, alpha)).epsilon(1e-12));
        }
    }
}

TEST_CASE("corrector weights reduce to the trapezoid rule at order 1")
{
    const std::size_t n = 12;
    CHECK(weight_a(0, n, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 1; j <= n; ++j) {
        CHECK(weight_a(j, n, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("corrector weight sign conventions differ")
{
    // The sign conventions differ only in the interior weights; the j = 0
    // weight is shared.
    CHECK(weight_a(0, 4, 0.6, CorrectorSign::standard_plus) ==
          weight_a(0, 4, 0.6, CorrectorSign::paper_minus));
    CHECK(weight_a(2, 4, 0.6, CorrectorSign::standard_plus) !=
          weight_a(2, 4, 0.6, CorrectorSign::paper_minus));
}

TEST_CASE("order-1 relaxation reproduces the exponential")
{
    const Grid grid = Grid::make(5.0, 0.01);
    const Trajectory traj = solve_decay(1.0, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i <= grid.steps; ++i) {
        worst = std::max(worst,
                         std::abs(traj.node(i)[0] - std::exp(-grid.time(i))));
    }
    CHECK(worst < 1e-4);
}

// Laplace-transform solution of the order-1/2 relaxation with unit
// normalization: x(t) = (2/3) E_{1/2}(-sqrt(t)/3). Reference values frozen
// from 40-digit arithmetic.
TEST_CASE("order-1/2 relaxation matches the closed form")
{
    const Grid grid = Grid::make(5.0, 0.001);
    const Trajectory traj = solve_decay(0.5, grid);
    struct Sample {
        std::size_t node;
        double want;
    };
    const Sample samples[] = {
        {500, 0.52072892102339616301},
        {1000, 0.47483525906670514259},
        {2000, 0.42043335992911926669},
        {5000, 0.33910100819813524271},
    };
    for (const auto& s : samples) {
        CHECK(std::abs(traj.node(s.node)[0] - s.want) < 2e-2);
    }
    // The scheme solves the integral form: the solution drops towards the
    // t -> 0+ layer value B/(B + (1-alpha)) = 2/3 right away instead of
    // decaying smoothly from 1.
    CHECK(traj.node(1)[0] < 0.8);
    CHECK(traj.node(1)[0] > 0.6);
}

TEST_CASE("paper-literal scheme drops the nonlocal correction")
{
    const Grid grid = Grid::make(2.0, 0.01);
    SchemeOptions literal;
    literal.nonlocal_term = NonlocalTerm::paper_literal;
    const Trajectory a = solve_decay(0.5, grid);
    const Trajectory b = solve_decay(0.5, grid, {}, literal);
    CHECK(std::abs(a.node(50)[0] - b.node(50)[0]) > 1e-3);
    // At order 1 the two variants solve the same classical problem.
    const Trajectory c = solve_decay(1.0, grid);
    const Trajectory d = solve_decay(1.0, grid, {}, literal);
    CHECK(std::abs(c.node(200)[0] - d.node(200)[0]) < 1e-3);
}

TEST_CASE("controls are sampled at their grid nodes")
{
    // dx = u with a step control: x follows the integrated schedule.
    const Rhs rhs = [](double, std::span<const double>,
                       std::span<const double> u, std::span<double> dx) {
        dx[0] = u[0];
    };
    const Grid grid = Grid::make(1.0, 0.1);
    ControlSchedule controls = ControlSchedule::zeros(grid.nodes());
    for (std::size_t i = 0; i <= grid.steps; ++i) {
        controls.values[i][0] = grid.time(i) < 0.5 ? 1.0 : 0.0;
    }
    const double x0[] = {0.0};
    const Trajectory traj =
        solve_forward(rhs, x0, 1.0, grid, controls, {}, {});
    CHECK(traj.node(10)[0] == doctest::Approx(0.5).epsilon(0.1));
    // Growth happens only while the control is on.
    CHECK(traj.node(4)[0] > traj.node(2)[0]);
    CHECK(traj.node(10)[0] == doctest::Approx(traj.node(6)[0]).epsilon(1e-12));
}

TEST_CASE("divergence raises with the failing node")
{
    const Rhs rhs = [](double, std::span<const double> x,
                       std::span<const double>, std::span<double> dx) {
        dx[0] = x[0] * x[0];
    };
    const Grid grid = Grid::make(2.0, 0.01);
    const double x0[] = {2.0};
    CHECK_THROWS_AS(solve_forward(rhs, x0, 1.0, grid,
                                  ControlSchedule::zeros(grid.nodes()), {}, {}),
                    DivergenceError);
}

TEST_CASE("invalid order and schedule coverage raise")
{
    const Grid grid = Grid::make(1.0, 0.1);
    const double x0[] = {1.0};
    CHECK_THROWS_AS(solve_forward(kDecay, x0, 0.0, grid,
                                  ControlSchedule::zeros(grid.nodes()), {}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_forward(kDecay, x0, 1.2, grid,
                                  ControlSchedule::zeros(grid.nodes()), {}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_forward(kDecay, x0, 0.5, grid,
                                  ControlSchedule::zeros(3), {}, {}),
                    std::invalid_argument);
}

TEST_CASE("history accounting is quadratic in the step count")
{
    const Grid grid = Grid::make(1.0, 0.05); // 20 steps
    const Trajectory traj = solve_decay(0.7, grid);
    CHECK(traj.stats.history_terms == 20 * 21 / 2);
    CHECK(traj.stats.rhs_evaluations >= 2 * grid.steps);
}

TEST_CASE("backward solve integrates right-sided problems by reflection")
{
    // With g = lambda, the reflected variable mu(s) = lambda(t_f - s) obeys
    // mu' = mu from mu(0) = 1, so lambda(t) = exp(t_f - t): the costate
    // grows away from its zero-history terminal value.
    const CostateRhs rhs = [](double, std::span<const double> lambda,
                              std::span<const double>,
                              std::span<const double>, std::span<double> out) {
        out[0] = lambda[0];
    };
    const Grid grid = Grid::make(2.0, 0.01);
    Trajectory stored; // mirrored state feed; contents unused by this rhs
    stored.grid = grid;
    stored.dim = 1;
    stored.data.assign(grid.nodes(), 0.0);
    const double terminal[] = {1.0};
    const Trajectory lambda =
        solve_backward(rhs, terminal, 1.0, grid, stored,
                       ControlSchedule::zeros(grid.nodes()), {}, {});
    CHECK(lambda.node(grid.steps)[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i : {std::size_t{0}, std::size_t{50}, std::size_t{150}}) {
        const double want = std::exp(grid.t_f - grid.time(i));
        CHECK(lambda.node(i)[0] == doctest::Approx(want).epsilon(1e-3));
    }
}

TEST_CASE("backward solve sees the stored state at mirrored nodes")
{
    // g = x(t); with x stored as x(t) = t the costate derivative must be the
    // time value at the same (unreflected) node.
    const CostateRhs rhs = [](double, std::span<const double>,
                              std::span<const double> x,
                              std::span<const double>, std::span<double> out) {
        out[0] = x[0];
    };
    const Grid grid = Grid::make(1.0, 0.01);
    Trajectory stored;
    stored.grid = grid;
    stored.dim = 1;
    stored.data.resize(grid.nodes());
    for (std::size_t i = 0; i <= grid.steps; ++i) {
        stored.data[i] = grid.time(i);
    }
    const double terminal[] = {0.0};
    const Trajectory lambda =
        solve_backward(rhs, terminal, 1.0, grid, stored,
                       ControlSchedule::zeros(grid.nodes()), {}, {});
    // mu' = t_f - s integrates to mu(s) = t_f s - s^2/2, i.e.
    // lambda(t) = (t_f^2 - t^2)/2.
    for (std::size_t i : {std::size_t{0}, std::size_t{40}, std::size_t{90}}) {
        const double t = grid.time(i);
        CHECK(lambda.node(i)[0] ==
              doctest::Approx((1.0 - t * t) / 2.0).epsilon(1e-3));
    }
}
