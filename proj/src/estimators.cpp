#include "nbp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nbp/model.hpp"

namespace nbp {

double es_estimate(std::span<const double> x, const EsConfig& cfg) {
    const std::size_t n = x.size();
    if (n < 2) throw std::domain_error("es_estimate: require n >= 2");
    if (!(cfg.c1 >= 2.0) || !(cfg.c2 >= 1.0))
        throw std::domain_error("es_estimate: require c1 >= 2 and c2 >= 1");
    const double thr = std::sqrt(cfg.c1 * std::log(static_cast<double>(n)));
    std::size_t count = 0;
    for (double v : x)
        if (std::fabs(v) > thr) ++count;
    const double dn = static_cast<double>(n);
    const double est = std::max(1.0 / dn, static_cast<double>(count) / (cfg.c2 * dn));
    return std::min(est, 1.0);
}

double reml_objective(std::span<const double> x, double a, double b,
                      const QuadratureSpec& spec) {
    const Hyperparams h(a, b);
    double total = 0.0;
    for (double xi : x) total += marginal_log_density(xi, h, spec);
    return total;
}

double reml_estimate(std::span<const double> x, double b, const RemlConfig& cfg) {
    const std::size_t n = x.size();
    if (n < 2) throw std::domain_error("reml_estimate: require n >= 2");
    if (!(b > 0.0)) throw std::domain_error("reml_estimate: require b > 0");
    if (cfg.coarse_grid_size < 2)
        throw std::domain_error("reml_estimate: require coarse_grid_size >= 2");

    const double lo = 1.0 / static_cast<double>(n);
    const double hi = 1.0;
    auto objective = [&](double a) {
        try {
            return reml_objective(x, a, b, cfg.quadrature);
        } catch (const NumericalError& e) {
            throw NumericalError("reml_estimate: quadrature failure at a = " +
                                     std::to_string(a) + " (" + e.what() + ")",
                                 e.best_estimate, e.error_estimate);
        }
    };

    // coarse log-spaced grid, endpoints exact
    const std::size_t m = cfg.coarse_grid_size;
    std::vector<double> grid(m);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (std::size_t i = 0; i < m; ++i)
        grid[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                     static_cast<double>(m - 1));
    grid.front() = lo;
    grid.back() = hi;

    double best_a = grid[0];
    double best_val = objective(grid[0]);
    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < m; ++i) {
        const double v = objective(grid[i]);
        if (v > best_val) { // strict: ties keep the smaller a
            best_val = v;
            best_a = grid[i];
            best_idx = i;
        }
    }

    // golden-section refinement on the bracketing triple
    double left = grid[best_idx > 0 ? best_idx - 1 : 0];
    double right = grid[std::min(best_idx + 1, m - 1)];
    auto consider = [&](double a, double v) {
        if (v > best_val || (v == best_val && a < best_a)) {
            best_val = v;
            best_a = a;
        }
    };
    const double inv_phi = 0.6180339887498948482;
    double x1 = right - inv_phi * (right - left);
    double x2 = left + inv_phi * (right - left);
    double f1 = objective(x1);
    double f2 = objective(x2);
    consider(x1, f1);
    consider(x2, f2);
    while (right - left > cfg.refine_tol) {
        if (f1 < f2) {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + inv_phi * (right - left);
            f2 = objective(x2);
            consider(x2, f2);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - inv_phi * (right - left);
            f1 = objective(x1);
            consider(x1, f1);
        }
    }
    return best_a;
}

} // namespace nbp
