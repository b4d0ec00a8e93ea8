#include "nbp/samplers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace nbp {

namespace {

void check_support(double lo, double hi) {
    if (!(0.0 < lo && lo < hi && hi <= 1.0))
        throw std::domain_error("APrior: require 0 < lo < hi <= 1");
}

} // namespace

APrior APrior::fixed(double a) {
    if (!(a > 0.0 && a <= 1.0))
        throw std::domain_error("APrior::fixed: require a in (0,1]");
    APrior p;
    p.kind = Kind::Fixed;
    p.value = a;
    p.lo = a;
    p.hi = a;
    return p;
}

APrior APrior::uniform(double lo, double hi) {
    check_support(lo, hi);
    APrior p;
    p.kind = Kind::Uniform;
    p.lo = lo;
    p.hi = hi;
    return p;
}

APrior APrior::trunc_cauchy(double lo, double hi) {
    check_support(lo, hi);
    APrior p;
    p.kind = Kind::TruncCauchy;
    p.lo = lo;
    p.hi = hi;
    return p;
}

APrior APrior::uniform_default(std::size_t n) {
    return uniform(1.0 / static_cast<double>(n), 1.0);
}

APrior APrior::trunc_cauchy_default(std::size_t n) {
    return trunc_cauchy(1.0 / static_cast<double>(n), 1.0);
}

void gibbs_step(ChainState& state, std::span<const double> x, double b,
                std::span<RandomStream> coord_streams) {
    const std::size_t n = x.size();
    if (state.theta.size() != n || state.lambda.size() != n ||
        state.xi.size() != n || coord_streams.size() != n)
        throw std::domain_error("gibbs_step: state/stream sizes must match data");

    // theta_i | rest ~ N((1-kappa_i) x_i, 1-kappa_i)
    for (std::size_t i = 0; i < n; ++i) {
        const double s2 = state.lambda[i] * state.xi[i];
        const double w = s2 / (1.0 + s2); // 1 - kappa_i
        state.theta[i] = w * x[i] + std::sqrt(w) * coord_streams[i].normal();
    }
    // lambda_i | rest ~ GIG(theta_i^2 / xi_i, 2, a - 1/2)
    const double p = state.a - 0.5;
    for (std::size_t i = 0; i < n; ++i) {
        double c = state.theta[i] * state.theta[i] / state.xi[i];
        if (c == 0.0 && p <= 0.0) c = 1e-300;
        state.lambda[i] = sample_gig(coord_streams[i], c, 2.0, p);
    }
    // xi_i | rest ~ IG(b + 1/2, theta_i^2/(2 lambda_i) + 1)
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = state.theta[i] * state.theta[i] / (2.0 * state.lambda[i]) + 1.0;
        state.xi[i] = sample_inverse_gamma(coord_streams[i], b + 0.5, scale);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(state.theta[i]) || !std::isfinite(state.lambda[i]) ||
            !std::isfinite(state.xi[i]))
            throw NumericalError("gibbs_step: chain state became non-finite",
                                 std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
}

namespace {

double trunc_normal_log_mass(double center, double omega, double lo, double hi) {
    // log of Phi((hi-center)/omega) - Phi((lo-center)/omega), center in [lo,hi]
    const double num = normal_cdf((hi - center) / omega) - normal_cdf((lo - center) / omega);
    return std::log(std::max(num, std::numeric_limits<double>::min()));
}

} // namespace

double mh_log_acceptance(double a, double a_star, std::size_t n, double b,
                         double sum_log_shrink, const APrior& prior, double omega) {
    if (prior.kind == APrior::Kind::Fixed)
        throw std::domain_error("mh_log_acceptance: prior must be Uniform or TruncCauchy");
    const double dn = static_cast<double>(n);
    double lr = dn * (std::lgamma(a_star + b) - std::lgamma(a_star) -
                      std::lgamma(a + b) + std::lgamma(a));
    lr += (a_star - a) * sum_log_shrink;
    lr += trunc_normal_log_mass(a, omega, prior.lo, prior.hi) -
          trunc_normal_log_mass(a_star, omega, prior.lo, prior.hi);
    if (prior.kind == APrior::Kind::TruncCauchy)
        lr += std::log1p(a) - std::log1p(a_star);
    return lr;
}

MhResult mh_update_a(const ChainState& state, const APrior& prior, double b,
                     double omega, RandomStream& stream) {
    if (prior.kind == APrior::Kind::Fixed)
        throw std::domain_error("mh_update_a: prior must be Uniform or TruncCauchy");
    if (!(omega > 0.0))
        throw std::domain_error("mh_update_a: require omega > 0");
    const double a = state.a;
    const double a_star = sample_truncated_normal(stream, a, omega, prior.lo, prior.hi);
    double sum_log_shrink = 0.0;
    for (std::size_t i = 0; i < state.lambda.size(); ++i) {
        const double s2 = state.lambda[i] * state.xi[i];
        sum_log_shrink += std::log(s2) - std::log1p(s2);
    }
    const double lr = mh_log_acceptance(a, a_star, state.lambda.size(), b,
                                        sum_log_shrink, prior, omega);
    if (std::log(stream.uniform()) < std::min(0.0, lr)) return {a_star, true};
    return {a, false};
}

double tune_omega(const std::vector<bool>& window, double omega,
                  double accept_lo, double accept_hi) {
    if (window.empty()) return omega;
    double rate = 0.0;
    for (bool acc : window) rate += acc ? 1.0 : 0.0;
    rate /= static_cast<double>(window.size());
    if (rate > accept_hi)
        omega *= 1.1;
    else if (rate < accept_lo)
        omega /= 1.1;
    return std::clamp(omega, 1e-4, 1.0);
}

PosteriorSummary run_chain(std::span<const double> x, double b, const APrior& prior,
                           const ChainSpec& spec) {
    const std::size_t n = x.size();
    if (n == 0) throw std::domain_error("run_chain: data must be non-empty");
    for (double xi : x)
        if (!std::isfinite(xi)) throw std::domain_error("run_chain: data must be finite");
    if (!(spec.burnin >= 0 && spec.burnin < spec.iterations))
        throw std::domain_error("run_chain: require 0 <= burnin < iterations");
    if (spec.thin < 1) throw std::domain_error("run_chain: require thin >= 1");
    if (!(spec.omega > 0.0)) throw std::domain_error("run_chain: require omega > 0");

    const bool hierarchical = prior.kind != APrior::Kind::Fixed;
    RandomStream master(spec.seed);
    RandomStream mh_stream = master.substream(0x6d68);
    std::vector<RandomStream> coord_streams;
    coord_streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        coord_streams.push_back(master.substream(std::bit_cast<std::uint64_t>(x[i])));

    ChainState state;
    state.theta.resize(n);
    state.lambda.assign(n, 1.0);
    state.xi.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        state.theta[i] = spec.theta_init.value_or(x[i]);
    state.a = (prior.kind == APrior::Kind::Fixed) ? prior.value
                                                  : 0.5 * (prior.lo + prior.hi);

    const std::size_t kept_total = (static_cast<std::size_t>(spec.iterations - spec.burnin) +
                                    static_cast<std::size_t>(spec.thin) - 1) /
                                   static_cast<std::size_t>(spec.thin);
    std::vector<float> theta_draws(kept_total * n); // row-major: draw, coordinate
    std::vector<double> mean_acc(n, 0.0), shrink_acc(n, 0.0);

    // batch means for the shrink-weight MC standard error
    const std::size_t n_batches =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(kept_total))));
    const std::size_t batch_size = std::max<std::size_t>(1, kept_total / n_batches);
    std::vector<double> batch_acc(n, 0.0);
    std::vector<double> batch_means; // flattened: batch, coordinate
    batch_means.reserve(n_batches * n);

    double omega = spec.omega;
    std::vector<bool> window;
    window.reserve(50);
    std::size_t mh_accepted = 0, mh_attempted = 0;
    double a_sum = 0.0;
    std::size_t kept = 0, in_batch = 0;

    for (int iter = 0; iter < spec.iterations; ++iter) {
        gibbs_step(state, x, b, coord_streams);
        if (hierarchical) {
            const MhResult res = mh_update_a(state, prior, b, omega, mh_stream);
            state.a = res.a_new;
            if (iter < spec.burnin) {
                if (spec.tune) {
                    window.push_back(res.accepted);
                    if (window.size() == 50) {
                        omega = tune_omega(window, omega, spec.accept_lo, spec.accept_hi);
                        window.clear();
                    }
                }
            } else {
                ++mh_attempted;
                if (res.accepted) ++mh_accepted;
            }
        }
        if (iter >= spec.burnin && (iter - spec.burnin) % spec.thin == 0) {
            float* row = theta_draws.data() + kept * n;
            for (std::size_t i = 0; i < n; ++i) {
                row[i] = static_cast<float>(state.theta[i]);
                mean_acc[i] += state.theta[i];
                const double s2 = state.lambda[i] * state.xi[i];
                const double w = s2 / (1.0 + s2);
                shrink_acc[i] += w;
                batch_acc[i] += w;
            }
            a_sum += state.a;
            ++kept;
            ++in_batch;
            if (in_batch == batch_size && batch_means.size() < n_batches * n) {
                for (std::size_t i = 0; i < n; ++i) {
                    batch_means.push_back(batch_acc[i] / static_cast<double>(batch_size));
                    batch_acc[i] = 0.0;
                }
                in_batch = 0;
            }
        }
    }

    PosteriorSummary out;
    out.post_mean.resize(n);
    out.post_median.resize(n);
    out.shrink_weight.resize(n);
    out.shrink_weight_se.assign(n, std::numeric_limits<double>::quiet_NaN());
    const double dk = static_cast<double>(kept);
    std::vector<float> scratch(kept);
    for (std::size_t i = 0; i < n; ++i) {
        out.post_mean[i] = mean_acc[i] / dk;
        out.shrink_weight[i] = shrink_acc[i] / dk;
        for (std::size_t r = 0; r < kept; ++r) scratch[r] = theta_draws[r * n + i];
        const std::size_t rank = (kept + 1) / 2; // nearest rank, 1-based
        std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
        out.post_median[i] = static_cast<double>(scratch[rank - 1]);
    }
    const std::size_t flushed = batch_means.size() / n;
    if (flushed >= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (std::size_t bidx = 0; bidx < flushed; ++bidx)
                m += batch_means[bidx * n + i];
            m /= static_cast<double>(flushed);
            double v = 0.0;
            for (std::size_t bidx = 0; bidx < flushed; ++bidx) {
                const double d = batch_means[bidx * n + i] - m;
                v += d * d;
            }
            v /= static_cast<double>(flushed - 1);
            out.shrink_weight_se[i] = std::sqrt(v / static_cast<double>(flushed));
        }
    }
    out.a_mean = hierarchical ? a_sum / dk : state.a;
    out.a_draws_kept = hierarchical ? kept : 0;
    out.mh_accept_rate = mh_attempted > 0
                             ? static_cast<double>(mh_accepted) / static_cast<double>(mh_attempted)
                             : 0.0;
    out.omega_final = omega;
    return out;
}

} // namespace nbp
