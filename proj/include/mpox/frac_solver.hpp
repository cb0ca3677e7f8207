#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpox {

/// Uniform time grid on [0, t_f] with N = t_f / h steps (N + 1 nodes).
struct Grid {
    double t_f = 36.0;
    double h = 0.1;
    std::size_t steps = 360;

    static Grid make(double t_f, double h);
    std::size_t nodes() const { return steps + 1; }
    double time(std::size_t i) const { return h * static_cast<double>(i); }
};

enum class KernelVariant { unit, ab_original };

/// Normalization B(alpha) of the Mittag-Leffler-kernel derivative,
/// constrained by B(0) = B(1) = 1.
struct KernelNormalization {
    KernelVariant variant = KernelVariant::unit;
    double value(double alpha) const;
};

enum class NonlocalTerm { ab_integral, paper_literal };
enum class CorrectorSign { standard_plus, paper_minus };

struct SchemeOptions {
    NonlocalTerm nonlocal_term = NonlocalTerm::ab_integral;
    CorrectorSign corrector_sign = CorrectorSign::standard_plus;
};

/// Corrector quadrature weight a_{j,n+1}.
double weight_a(std::size_t j, std::size_t n, double alpha,
                CorrectorSign sign = CorrectorSign::standard_plus);

/// Predictor weight b_{j,n+1} = (n+1-j)^alpha - (n-j)^alpha.
double weight_b(std::size_t j, std::size_t n, double alpha);

/// Node-aligned control samples (u1, u2, u3) on a grid.
struct ControlSchedule {
    std::vector<std::array<double, 3>> values;

    static ControlSchedule zeros(std::size_t nodes)
    {
        ControlSchedule s;
        s.values.assign(nodes, {0.0, 0.0, 0.0});
        return s;
    }
    std::size_t nodes() const { return values.size(); }
    const std::array<double, 3>& at(std::size_t i) const { return values[i]; }
};

struct SolveStats {
    std::size_t rhs_evaluations = 0;
    /// Number of terms accumulated in the corrector history sums.
    std::size_t history_terms = 0;
};

/// Node-major storage of a solved trajectory.
struct Trajectory {
    Grid grid;
    std::size_t dim = 0;
    std::vector<double> data; // nodes() * dim values
    SolveStats stats;

    std::span<const double> node(std::size_t i) const
    {
        return {data.data() + i * dim, dim};
    }
    std::span<double> node(std::size_t i)
    {
        return {data.data() + i * dim, dim};
    }
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t node, double time)
        : std::runtime_error("non-finite state at node " + std::to_string(node) +
                             " (t = " + std::to_string(time) + ")"),
          node(node) {}
    std::size_t node;
};

/// f(t, X, U) -> dX; U is the control sample at the evaluation node.
using Rhs = std::function<void(double t, std::span<const double> x,
                               std::span<const double> u, std::span<double> dx)>;

/// g(t, Lambda, X, U) -> right-sided fractional derivative of the costate.
using CostateRhs = std::function<void(double t, std::span<const double> lambda,
                                      std::span<const double> x,
                                      std::span<const double> u,
                                      std::span<double> out)>;

/// Adams predictor-corrector (PECE) integration of the left-sided
/// Mittag-Leffler-kernel system of order alpha, X' = f(t, X, U), from x0
/// over the grid.
Trajectory solve_forward(const Rhs& rhs, std::span<const double> x0,
                         double alpha, const Grid& grid,
                         const ControlSchedule& controls,
                         KernelNormalization norm, SchemeOptions options);

/// Backward costate integration. The right-sided problem is reflected in time
/// (s = t_f - t), solved with the forward machinery against mirrored samples
/// of the stored state and controls, and index-reversed on return.
Trajectory solve_backward(const CostateRhs& rhs, std::span<const double> terminal,
                          double alpha, const Grid& grid, const Trajectory& stored,
                          const ControlSchedule& controls,
                          KernelNormalization norm, SchemeOptions options);

namespace detail {
/// RHS addressed by node index; the public entry points adapt to this form.
using NodeRhs = std::function<void(double t, std::size_t node,
                                   std::span<const double> x, std::span<double> dx)>;
Trajectory solve_nodes(const NodeRhs& rhs, std::span<const double> x0,
                       double alpha, const Grid& grid, KernelNormalization norm,
                       SchemeOptions options);
}

} // namespace mpox
