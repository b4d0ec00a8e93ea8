#ifndef NBP_STATS_HPP
#define NBP_STATS_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace nbp {

/// Thrown when an iterative numerical routine fails to reach its tolerance.
/// Carries the best estimate obtained so far and its error estimate.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

// ---------------------------------------------------------------------------
// special functions
// ---------------------------------------------------------------------------

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate for large x (via erfc).
double normal_cdf_c(double x);
/// Inverse of normal_cdf on (0,1). Wichura's AS 241 (PPND16).
double normal_quantile(double q);

/// Regularized incomplete gamma P(a,x) (lower) and Q(a,x) (upper).
double incomplete_gamma_p(double a, double x);
double incomplete_gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a,b).
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with df >= 1 degrees of freedom.
double student_t_cdf(double t, int df);

// ---------------------------------------------------------------------------
// seeded variate generation
// ---------------------------------------------------------------------------

/// Deterministic random stream. Identical seeds give identical sequences.
/// Sub-streams derived via substream(key) use statistically independent
/// seeds (splitmix64 mixing) and may be handed to concurrent workers;
/// a single stream must never be shared between threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Independent child stream keyed by (seed, key).
    RandomStream substream(std::uint64_t key) const;

    std::uint64_t seed() const { return seed_; }

    /// Uniform variate in the open interval (0,1).
    double uniform();
    /// Standard normal via inverse-CDF (one uniform per variate).
    double normal();
    /// Gamma(shape, rate) via Marsaglia-Tsang; shape, rate > 0.
    double gamma(double shape, double rate);

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

/// Generalized inverse Gaussian with density f(x) ∝ x^(p-1) e^(-(c/x + d·x)/2).
/// Degenerate routing: c = 0 -> Gamma(p, rate d/2) (needs p > 0);
/// d = 0 -> InverseGamma(-p, scale c/2) (needs p < 0).
double sample_gig(RandomStream& stream, double c, double d, double p);

/// Reciprocal of a Gamma(shape, rate = scale) variate.
double sample_inverse_gamma(RandomStream& stream, double shape, double scale);

/// Normal(mean, sd) restricted to [lo, hi], inverse-CDF method with
/// complementary-CDF handling for far-tail truncation.
double sample_truncated_normal(RandomStream& stream, double mean, double sd,
                               double lo, double hi);

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 200;
};

struct QuadratureResult {
    double value;
    double err_est;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over (lo, hi).
/// Endpoints may be +-infinity (handled by rational substitution).
/// Integrable endpoint singularities of the integrand are the caller's
/// responsibility (apply a substitution first). Throws NumericalError,
/// carrying the best estimate, if the tolerance is not reached within
/// spec.max_subdivisions.
QuadratureResult integrate(const std::function<double(double)>& f,
                           double lo, double hi,
                           const QuadratureSpec& spec = QuadratureSpec{});

} // namespace nbp

#endif
