#include "mpox/special_functions.hpp"

#include <cmath>
#include <limits>

namespace mpox {

namespace {

// Lanczos approximation, g = 7, 9 coefficients (Godfrey's set).
constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoef[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};
constexpr double kSqrtTwoPi = 2.5066282746310002;

bool is_nonpositive_integer(double x)
{
    return x <= 0.0 && x == std::floor(x);
}

// Valid for x >= 0.5.
double lanczos_gamma(double x)
{
    const double z = x - 1.0;
    double acc = kLanczosCoef[0];
    for (int i = 1; i < 9; ++i) {
        acc += kLanczosCoef[i] / (z + i);
    }
    const double t = z + kLanczosG + 0.5;
    return kSqrtTwoPi * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

double lanczos_log_gamma(double x)
{
    const double z = x - 1.0;
    double acc = kLanczosCoef[0];
    for (int i = 1; i < 9; ++i) {
        acc += kLanczosCoef[i] / (z + i);
    }
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

// Neumaier-compensated accumulator.
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

constexpr int kMaxTerms = 4000;

} // namespace

double gamma_fn(double x)
{
    if (!std::isfinite(x)) {
        throw std::domain_error("gamma requires a finite argument");
    }
    if (is_nonpositive_integer(x)) {
        throw GammaPoleError(x);
    }
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return M_PI / (std::sin(M_PI * x) * lanczos_gamma(1.0 - x));
    }
    return lanczos_gamma(x);
}

double log_gamma(double x)
{
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma requires x > 0");
    }
    if (x < 0.5) {
        return std::log(gamma_fn(x));
    }
    return lanczos_log_gamma(x);
}

namespace {

double ml_series(double omega, double xi, double z)
{
    if (!(omega > 0.0) || !(xi > 0.0)) {
        throw std::domain_error("Mittag-Leffler orders must be positive");
    }
    if (!std::isfinite(z)) {
        throw std::domain_error("Mittag-Leffler argument must be finite");
    }
    CompensatedSum acc;
    if (z == 0.0) {
        return 1.0 / gamma_fn(xi);
    }
    if (std::abs(z) > 25.0) {
        throw MittagLefflerRangeError("Mittag-Leffler argument outside |z| <= 25", 0.0);
    }
    const double log_abs_z = std::log(std::abs(z));
    int tail_converged = 0;
    for (int i = 0; i < kMaxTerms; ++i) {
        const double log_mag = i * log_abs_z - log_gamma(omega * i + xi);
        if (log_mag > 700.0) {
            throw MittagLefflerRangeError("Mittag-Leffler term overflow", acc.value());
        }
        double term = std::exp(log_mag);
        if (z < 0.0 && (i & 1)) {
            term = -term;
        }
        acc.add(term);
        // Two consecutive negligible terms guard alternating-series stalls.
        if (std::abs(term) <= 1e-16 * std::abs(acc.value()) + 1e-300) {
            if (++tail_converged >= 2) {
                return acc.value();
            }
        } else {
            tail_converged = 0;
        }
    }
    throw MittagLefflerRangeError("Mittag-Leffler series did not converge", acc.value());
}

} // namespace

double ml_one(double omega, double z)
{
    return ml_series(omega, 1.0, z);
}

double ml_two(double omega, double xi, double z)
{
    return ml_series(omega, xi, z);
}

namespace detail {

double ml_partial_sum(double omega, double xi, double z, int n_terms)
{
    CompensatedSum acc;
    for (int i = 0; i < n_terms; ++i) {
        double term;
        if (z == 0.0) {
            term = (i == 0) ? 1.0 / gamma_fn(xi) : 0.0;
        } else {
            term = std::exp(i * std::log(std::abs(z)) - log_gamma(omega * i + xi));
            if (z < 0.0 && (i & 1)) {
                term = -term;
            }
        }
        acc.add(term);
    }
    return acc.value();
}

} // namespace detail

} // namespace mpox
