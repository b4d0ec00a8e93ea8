#ifndef NBP_TESTS_HELPERS_HPP
#define NBP_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "nbp/stats.hpp"

namespace nbp_test {

// Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> draws,
                           const std::function<double(double)>& cdf) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double f = cdf(draws[i]);
        d = std::max(d, std::fabs((i + 1.0) / n - f));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

// KS statistic evaluated on every k-th order statistic only (for CDFs that
// are expensive to evaluate, e.g. obtained by quadrature). The extra grid
// slack is bounded by k/n.
inline double ks_statistic_coarse(std::vector<double> draws,
                                  const std::function<double(double)>& cdf,
                                  std::size_t step) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); i += step) {
        const double f = cdf(draws[i]);
        d = std::max(d, std::fabs((i + 1.0) / n - f));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

// Standard error of the sample mean.
inline double mean_se(const std::vector<double>& v) {
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

} // namespace nbp_test

#endif
