#ifndef NBP_SAMPLERS_HPP
#define NBP_SAMPLERS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nbp/stats.hpp"

namespace nbp {

/// Prior on the sparsity hyperparameter a: fixed value, Uniform(lo, hi),
/// or standard Cauchy truncated to [lo, hi].
struct APrior {
    enum class Kind { Fixed, Uniform, TruncCauchy };
    Kind kind = Kind::Fixed;
    double value = 0.5; // Fixed only
    double lo = 0.0;
    double hi = 1.0;

    static APrior fixed(double a);
    static APrior uniform(double lo, double hi);
    static APrior trunc_cauchy(double lo, double hi);
    /// Default supports [1/n, 1].
    static APrior uniform_default(std::size_t n);
    static APrior trunc_cauchy_default(std::size_t n);
};

struct ChainSpec {
    int iterations = 10000;
    int burnin = 5000;
    int thin = 1;
    std::uint64_t seed = 1;
    double omega = 0.1; // MH proposal sd (tuned during burn-in)
    bool tune = true;
    double accept_lo = 0.20;
    double accept_hi = 0.40;
    /// If set, every theta starts at this value instead of the data.
    std::optional<double> theta_init;
};

/// Evolving sampler state under the reparametrization sigma_i^2 = lambda_i xi_i
/// (kappa_i = 1/(1 + lambda_i xi_i) is implicit).
struct ChainState {
    std::vector<double> theta;
    std::vector<double> lambda;
    std::vector<double> xi;
    double a = 0.5;
};

struct PosteriorSummary {
    std::vector<double> post_mean;
    std::vector<double> post_median;      // nearest-rank over kept draws
    std::vector<double> shrink_weight;    // mean of 1 - kappa_i over kept draws
    std::vector<double> shrink_weight_se; // batch-means Monte Carlo standard error
    double a_mean = 0.0;
    std::size_t a_draws_kept = 0;
    double mh_accept_rate = 0.0; // post burn-in; 0 for fixed-a chains
    double omega_final = 0.0;
};

/// One full Gibbs sweep: all theta, then all lambda, then all xi, each
/// coordinate from its exact full conditional using state.a as the sparsity
/// shape and b as the tail shape. One RandomStream per coordinate.
void gibbs_step(ChainState& state, std::span<const double> x, double b,
                std::span<RandomStream> coord_streams);

/// Log acceptance ratio for the random-walk move a -> a_star where
/// sum_log_shrink = sum_i log(sigma_i^2 / (1 + sigma_i^2)). Exposed for tests.
double mh_log_acceptance(double a, double a_star, std::size_t n, double b,
                         double sum_log_shrink, const APrior& prior, double omega);

struct MhResult {
    double a_new;
    bool accepted;
};

/// Metropolis-Hastings update of a with a truncated-normal proposal on
/// [prior.lo, prior.hi]. prior must be Uniform or TruncCauchy.
MhResult mh_update_a(const ChainState& state, const APrior& prior, double b,
                     double omega, RandomStream& stream);

/// Scale omega toward the acceptance band: x1.1 above accept_hi, /1.1 below
/// accept_lo, clamped to [1e-4, 1]. Called on burn-in windows only.
double tune_omega(const std::vector<bool>& window, double omega,
                  double accept_lo = 0.20, double accept_hi = 0.40);

/// Run the full sampler and summarize. Deterministic given spec.seed.
/// Coordinate sub-streams are keyed by the data value, so under a fixed a
/// permuting x permutes the summary vectors identically.
PosteriorSummary run_chain(std::span<const double> x, double b, const APrior& prior,
                           const ChainSpec& spec);

} // namespace nbp

#endif
