#ifndef NBP_MODEL_HPP
#define NBP_MODEL_HPP

#include <cstddef>

#include "nbp/stats.hpp"

namespace nbp {

/// Shape pair (a, b) of the beta prime scale prior: a governs spike mass,
/// b tail weight.
struct Hyperparams {
    double a;
    double b;

    Hyperparams(double a_, double b_);

    /// Multiple-testing regime: additionally requires a in (0,1] and b > 1/2,
    /// and a >= 1/n when n > 0 is supplied.
    static Hyperparams for_testing(double a_, double b_, std::size_t n = 0);
};

/// Sparsity/signal-strength scheme (u, v, C) for oracle-risk evaluation:
/// u = (psi/(zeta+1))^2, v = u f^2 with f = (1-p)/p, C = log(v)/u.
struct AsymptoticScheme {
    double u;
    double v;
    double C;

    static AsymptoticScheme from_two_groups(double p, double psi, double zeta = 0.0);
};

/// ln of the beta prime density at sigma2 > 0.
double beta_prime_log_pdf(double sigma2, const Hyperparams& h);

/// ln of the unnormalized posterior density of the shrinkage factor kappa
/// given one observation x: exp(-kappa x^2/2) kappa^(b-1/2) (1-kappa)^(a-1).
double kappa_log_posterior_unnorm(double kappa, double x, const Hyperparams& h);

/// Posterior shrinkage weight E(1 - kappa | x), by quadrature. Strictly in (0,1).
double shrinkage_weight(double x, const Hyperparams& h,
                        const QuadratureSpec& spec = QuadratureSpec{});

/// Posterior tail probabilities Pr(kappa < eps | x) and Pr(kappa > eta | x),
/// by quadrature (used to verify the concentration bound calculators).
double kappa_prob_below(double eps, double x, const Hyperparams& h,
                        const QuadratureSpec& spec = QuadratureSpec{});
double kappa_prob_above(double eta, double x, const Hyperparams& h,
                        const QuadratureSpec& spec = QuadratureSpec{});

/// ln m(x), the marginal density of a single observation under the prior.
double marginal_log_density(double x, const Hyperparams& h,
                            const QuadratureSpec& spec = QuadratureSpec{});

/// ln of the (unnormalized) marginal prior density of theta, via the
/// lambda-integral representation. Unbounded as theta -> 0 when a <= 1/2.
double marginal_prior_log_density(double theta, const Hyperparams& h,
                                  const QuadratureSpec& spec = QuadratureSpec{});

// --- concentration / error-probability bound calculators ---

/// Upper bound on E(1 - kappa | x): e^(x^2/2) a/(a + b + 1/2).
double bound_ew(double x, const Hyperparams& h);

/// Upper bound on Pr(kappa < eps | x); requires a in (0,1), b > 1/2.
double bound_tail_small(double eps, double x, const Hyperparams& h);

/// Upper bound on Pr(kappa > eta | x); requires a in (0,1), b > 1/2.
double bound_tail_large(double eta, double delta, double x, const Hyperparams& h);

/// Upper bound on the type I error of the half-threshold rule.
double type1_upper_bound(const Hyperparams& h);

/// Lower bound on the type I error; returns 0 when the bound is vacuous.
double type1_lower_bound(const Hyperparams& h, double xi, double delta);

struct Type2Bounds {
    double lower;
    double upper;
};

/// Type II error bounds: lower = 2 Phi(sqrt(C)) - 1, upper = 2 Phi(sqrt(rho C / 2)) - 1.
/// rho may be any value >= 2 (the bounds coincide at rho = 2).
Type2Bounds type2_bounds(const AsymptoticScheme& scheme, double rho);

} // namespace nbp

#endif
