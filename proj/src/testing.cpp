#include "nbp/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nbp {

TwoGroupsSpec::TwoGroupsSpec(std::size_t n_, double p_, double psi_, double zeta_)
    : n(n_), p(p_), psi(psi_), zeta(zeta_) {
    if (n == 0) throw std::domain_error("TwoGroupsSpec: require n > 0");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("TwoGroupsSpec: require p in (0,1)");
    if (!(psi > 0.0) || zeta < 0.0 || !(psi > zeta))
        throw std::domain_error("TwoGroupsSpec: require psi > zeta >= 0");
}

DecisionReport half_threshold(std::span<const double> weights, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("half_threshold: require alpha in (0,1)");
    DecisionReport rep;
    rep.method = "half-threshold";
    rep.reject.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]))
            throw std::domain_error("half_threshold: weights must be finite");
        rep.reject[i] = weights[i] > alpha;
        if (rep.reject[i]) ++rep.n_rejections;
    }
    return rep;
}

double oracle_threshold(const TwoGroupsSpec& spec) {
    const double f = (1.0 - spec.p) / spec.p;
    const double u = (spec.psi / (spec.zeta + 1.0)) * (spec.psi / (spec.zeta + 1.0));
    const double v = u * f * f;
    return (1.0 + 1.0 / u) * (std::log(v) + std::log1p(1.0 / u));
}

DecisionReport oracle_decisions(std::span<const double> x, const TwoGroupsSpec& spec) {
    const double c2 = oracle_threshold(spec);
    DecisionReport rep;
    rep.method = "bayes-oracle";
    rep.reject.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        rep.reject[i] = x[i] * x[i] > c2;
        if (rep.reject[i]) ++rep.n_rejections;
    }
    return rep;
}

double oracle_risk(std::size_t n, double p, double C) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("oracle_risk: require p in (0,1)");
    if (!(C > 0.0)) throw std::domain_error("oracle_risk: require C > 0");
    return static_cast<double>(n) * p * (2.0 * normal_cdf(std::sqrt(C)) - 1.0);
}

DecisionReport bh_decisions(std::span<const double> pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("bh_decisions: require alpha in (0,1)");
    const std::size_t n = pvalues.size();
    for (double p : pvalues)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("bh_decisions: p-values must lie in [0,1]");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pvalues[i] < pvalues[j]; });
    // largest k with p_(k) <= k alpha / n
    double thr = -1.0;
    for (std::size_t k = n; k >= 1; --k) {
        if (pvalues[order[k - 1]] <=
            static_cast<double>(k) * alpha / static_cast<double>(n)) {
            thr = pvalues[order[k - 1]];
            break;
        }
    }
    DecisionReport rep;
    rep.method = "benjamini-hochberg";
    rep.reject.assign(n, false);
    if (thr >= 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            rep.reject[i] = pvalues[i] <= thr; // ties kept together
            if (rep.reject[i]) ++rep.n_rejections;
        }
    }
    return rep;
}

std::vector<double> two_sided_pvalues(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = std::min(1.0, 2.0 * normal_cdf_c(std::fabs(x[i])));
    return out;
}

double inclusion_prob(double x, double p, double psi) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inclusion_prob: require p in (0,1)");
    if (!(psi > 0.0)) throw std::domain_error("inclusion_prob: require psi > 0");
    const double psi2 = psi * psi;
    const double f = (1.0 - p) / p;
    const double t = f * std::sqrt(1.0 + psi2) *
                     std::exp(-0.5 * x * x * psi2 / (1.0 + psi2));
    return 1.0 / (t + 1.0);
}

Metrics compute_metrics(const DecisionReport& report, const std::vector<bool>& truth,
                        std::span<const double> estimate,
                        std::span<const double> theta_true) {
    const std::size_t n = report.reject.size();
    if (truth.size() != n || estimate.size() != n || theta_true.size() != n)
        throw std::domain_error("compute_metrics: vector lengths must match");
    std::size_t fp = 0, fn = 0, rejections = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (report.reject[i]) {
            ++rejections;
            if (!truth[i]) ++fp;
        } else if (truth[i]) {
            ++fn;
        }
    }
    Metrics m;
    m.mp = static_cast<double>(fp + fn) / static_cast<double>(n);
    m.fdr = static_cast<double>(fp) /
            std::max<double>(1.0, static_cast<double>(rejections));
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = estimate[i] - theta_true[i];
        sq += d * d;
    }
    m.mse = sq / static_cast<double>(n);
    return m;
}

} // namespace nbp
