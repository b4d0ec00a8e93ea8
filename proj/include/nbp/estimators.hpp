#ifndef NBP_ESTIMATORS_HPP
#define NBP_ESTIMATORS_HPP

#include <cstddef>
#include <span>

#include "nbp/stats.hpp"

namespace nbp {

struct EsConfig {
    double c1 = 2.0; // exceedance threshold constant, >= 2
    double c2 = 1.0; // count scaling constant, >= 1
};

/// Estimated-sparsity plug-in:
/// max{ 1/n, (1/(c2 n)) #{ j : |x_j| > sqrt(c1 log n) } }, clamped above at 1.
double es_estimate(std::span<const double> x, const EsConfig& cfg = EsConfig{});

struct RemlConfig {
    std::size_t coarse_grid_size = 50; // log-spaced on [1/n, 1], endpoints included
    double refine_tol = 1e-6;
    QuadratureSpec quadrature{};
};

/// Sum of log marginal densities at (a, b); the REML objective.
double reml_objective(std::span<const double> x, double a, double b,
                      const QuadratureSpec& spec = QuadratureSpec{});

/// Restricted marginal maximum likelihood estimate of a over [1/n, 1] at
/// fixed b: coarse grid then golden-section refinement; ties toward smaller a.
double reml_estimate(std::span<const double> x, double b,
                     const RemlConfig& cfg = RemlConfig{});

} // namespace nbp

#endif
