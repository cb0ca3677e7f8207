#pragma once

#include <stdexcept>
#include <string>

namespace mpox {

/// Thrown when the Gamma function is evaluated at a pole (0, -1, -2, ...).
class GammaPoleError : public std::domain_error {
public:
    explicit GammaPoleError(double x)
        : std::domain_error("gamma evaluated at pole x = " + std::to_string(x)) {}
};

/// Thrown when a Mittag-Leffler series cannot be summed reliably.
/// Carries the partial sum accumulated before the failure as a diagnostic.
class MittagLefflerRangeError : public std::range_error {
public:
    MittagLefflerRangeError(const std::string& what, double partial)
        : std::range_error(what + " (partial sum " + std::to_string(partial) + ")"),
          partial_sum(partial) {}
    double partial_sum;
};

/// Gamma function for real x outside the poles.
/// Relative error <= 1e-12 on [0.1, 30].
double gamma_fn(double x);

/// log(Gamma(x)) for x > 0.
double log_gamma(double x);

/// One-parameter Mittag-Leffler function, sum z^i / Gamma(omega*i + 1).
/// Requires omega > 0 and |z| <= 25; larger arguments raise
/// MittagLefflerRangeError rather than switching to asymptotics.
double ml_one(double omega, double z);

/// Two-parameter Mittag-Leffler function, sum z^i / Gamma(omega*i + xi).
/// ml_two(omega, 1, z) == ml_one(omega, z).
double ml_two(double omega, double xi, double z);

namespace detail {
/// Truncated series with exactly n_terms terms; used by the truncation
/// self-consistency tests.
double ml_partial_sum(double omega, double xi, double z, int n_terms);
}

} // namespace mpox
