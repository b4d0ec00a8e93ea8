#ifndef NBP_TESTING_HPP
#define NBP_TESTING_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nbp/model.hpp"

namespace nbp {

/// Data-generating parameters for the two-groups model.
struct TwoGroupsSpec {
    std::size_t n;
    double p;    // signal proportion
    double psi;  // slab scale
    double zeta; // null scale (0 = point mass at zero)

    TwoGroupsSpec(std::size_t n_, double p_, double psi_, double zeta_ = 0.0);
};

struct DecisionReport {
    std::vector<bool> reject;
    std::size_t n_rejections = 0;
    std::string method;
};

struct Metrics {
    double mp;  // misclassification proportion
    double fdr; // false discovery rate, max{1,.} denominator
    double mse; // mean squared error of the estimate
};

/// Reject H0i iff weights[i] > alpha (strict).
DecisionReport half_threshold(std::span<const double> weights, double alpha = 0.5);

/// Bayes Oracle threshold c^2; decisions reject iff x^2 > c^2.
double oracle_threshold(const TwoGroupsSpec& spec);
DecisionReport oracle_decisions(std::span<const double> x, const TwoGroupsSpec& spec);

/// Leading term of the oracle risk: n p (2 Phi(sqrt(C)) - 1).
double oracle_risk(std::size_t n, double p, double C);

/// Benjamini-Hochberg step-up at level alpha.
DecisionReport bh_decisions(std::span<const double> pvalues, double alpha);

/// Two-sided normal p-values 2(1 - Phi(|x|)).
std::vector<double> two_sided_pvalues(std::span<const double> x);

/// Posterior inclusion probability of the two-groups model.
double inclusion_prob(double x, double p, double psi);

Metrics compute_metrics(const DecisionReport& report, const std::vector<bool>& truth,
                        std::span<const double> estimate,
                        std::span<const double> theta_true);

} // namespace nbp

#endif
