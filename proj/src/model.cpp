#include "nbp/model.hpp"

#include <cmath>
#include <limits>

namespace nbp {

Hyperparams::Hyperparams(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("Hyperparams: require a > 0 and b > 0");
}

Hyperparams Hyperparams::for_testing(double a_, double b_, std::size_t n) {
    if (!(a_ > 0.0) || a_ > 1.0)
        throw std::domain_error("Hyperparams::for_testing: require a in (0,1]");
    if (!(b_ > 0.5))
        throw std::domain_error("Hyperparams::for_testing: require b > 1/2");
    if (n > 0 && a_ < 1.0 / static_cast<double>(n))
        throw std::domain_error("Hyperparams::for_testing: require a >= 1/n");
    return Hyperparams(a_, b_);
}

AsymptoticScheme AsymptoticScheme::from_two_groups(double p, double psi, double zeta) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("AsymptoticScheme: require p in (0,1)");
    if (!(psi > 0.0) || zeta < 0.0 || !(psi > zeta))
        throw std::domain_error("AsymptoticScheme: require psi > zeta >= 0");
    AsymptoticScheme s;
    const double f = (1.0 - p) / p;
    s.u = (psi / (zeta + 1.0)) * (psi / (zeta + 1.0));
    s.v = s.u * f * f;
    s.C = std::log(s.v) / s.u;
    if (!(s.C > 0.0))
        throw std::domain_error("AsymptoticScheme: log(v)/u must be positive");
    return s;
}

double beta_prime_log_pdf(double sigma2, const Hyperparams& h) {
    if (!(sigma2 > 0.0))
        throw std::domain_error("beta_prime_log_pdf: require sigma2 > 0");
    return std::lgamma(h.a + h.b) - std::lgamma(h.a) - std::lgamma(h.b) +
           (h.a - 1.0) * std::log(sigma2) - (h.a + h.b) * std::log1p(sigma2);
}

double kappa_log_posterior_unnorm(double kappa, double x, const Hyperparams& h) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::domain_error("kappa_log_posterior_unnorm: require kappa in (0,1)");
    return -0.5 * kappa * x * x + (h.b - 0.5) * std::log(kappa) +
           (h.a - 1.0) * std::log1p(-kappa);
}

namespace {

// Integral of g(kappa) kappa^(b-1/2) (1-kappa)^(a-1) e^(-kappa x^2/2) over
// [lo, hi] within [0,1]. The integrable endpoint singularities at 0 (b < 1/2)
// and 1 (a < 1) are absorbed exactly by the substitutions kappa = s^(1/(b+1/2))
// and 1 - kappa = t^(1/a); pieces away from the endpoints integrate directly.
double kappa_kernel_integral(const std::function<double(double)>& g,
                             double lo, double hi, double x,
                             const Hyperparams& h, const QuadratureSpec& spec) {
    const double half_x2 = 0.5 * x * x;
    const double bp = h.b + 0.5;
    auto no_kappa_power = [&](double k) {
        return g(k) * std::pow(1.0 - k, h.a - 1.0) * std::exp(-half_x2 * k);
    };
    auto no_comp_power = [&](double k) {
        return g(k) * std::pow(k, h.b - 0.5) * std::exp(-half_x2 * k);
    };
    // For large |x| the factor e^(-kappa x^2/2) concentrates all mass in a
    // layer of width ~1/x^2 at the left edge, far below the resolution of a
    // single panel; a split at the layer scale keeps it visible.
    auto integrate_with_split = [&](const std::function<double(double)>& f,
                                    double from, double to, double split) {
        if (split > from && split < to)
            return integrate(f, from, split, spec).value +
                   integrate(f, split, to, spec).value;
        return integrate(f, from, to, spec).value;
    };
    double total = 0.0;
    const double mid = 0.5;
    if (lo < mid) {
        const double up = std::min(hi, mid);
        if (lo == 0.0) {
            auto f = [&](double s) { return no_kappa_power(std::pow(s, 1.0 / bp)); };
            double split = -1.0;
            if (half_x2 * up > 50.0) split = std::pow(25.0 / half_x2, bp);
            total += integrate_with_split(f, 0.0, std::pow(up, bp), split) / bp;
        } else {
            auto f = [&](double k) { return no_kappa_power(k) * std::pow(k, h.b - 0.5); };
            double split = -1.0;
            if (half_x2 * (up - lo) > 50.0) split = lo + 25.0 / half_x2;
            total += integrate_with_split(f, lo, up, split);
        }
    }
    if (hi > mid) {
        const double dn = std::max(lo, mid);
        if (hi == 1.0) {
            auto f = [&](double t) { return no_comp_power(1.0 - std::pow(t, 1.0 / h.a)); };
            total += integrate(f, 0.0, std::pow(1.0 - dn, h.a), spec).value / h.a;
        } else {
            auto f = [&](double k) { return no_comp_power(k) * std::pow(1.0 - k, h.a - 1.0); };
            total += integrate(f, dn, hi, spec).value;
        }
    }
    return total;
}

double clamp_open_unit(double w) {
    const double lowest = std::numeric_limits<double>::min();
    if (w <= 0.0) return lowest;
    if (w >= 1.0) return std::nextafter(1.0, 0.0);
    return w;
}

void require_testing_regime(const Hyperparams& h, const char* who) {
    if (!(h.a > 0.0 && h.a < 1.0) || !(h.b > 0.5))
        throw std::domain_error(std::string(who) + ": require a in (0,1) and b > 1/2");
}

} // namespace

double shrinkage_weight(double x, const Hyperparams& h, const QuadratureSpec& spec) {
    auto one = [](double) { return 1.0; };
    auto comp = [](double k) { return 1.0 - k; };
    const double den = kappa_kernel_integral(one, 0.0, 1.0, x, h, spec);
    const double num = kappa_kernel_integral(comp, 0.0, 1.0, x, h, spec);
    return clamp_open_unit(num / den);
}

double kappa_prob_below(double eps, double x, const Hyperparams& h,
                        const QuadratureSpec& spec) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("kappa_prob_below: require eps in (0,1)");
    auto one = [](double) { return 1.0; };
    const double den = kappa_kernel_integral(one, 0.0, 1.0, x, h, spec);
    const double num = kappa_kernel_integral(one, 0.0, eps, x, h, spec);
    return clamp_open_unit(num / den);
}

double kappa_prob_above(double eta, double x, const Hyperparams& h,
                        const QuadratureSpec& spec) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::domain_error("kappa_prob_above: require eta in (0,1)");
    auto one = [](double) { return 1.0; };
    const double den = kappa_kernel_integral(one, 0.0, 1.0, x, h, spec);
    const double num = kappa_kernel_integral(one, eta, 1.0, x, h, spec);
    return clamp_open_unit(num / den);
}

double marginal_log_density(double x, const Hyperparams& h, const QuadratureSpec& spec) {
    static const double half_log_2pi = 0.9189385332046727418;
    auto one = [](double) { return 1.0; };
    const double kernel = kappa_kernel_integral(one, 0.0, 1.0, x, h, spec);
    return std::lgamma(h.a + h.b) - std::lgamma(h.a) - std::lgamma(h.b) -
           half_log_2pi + std::log(kernel);
}

double marginal_prior_log_density(double theta, const Hyperparams& h,
                                  const QuadratureSpec& spec) {
    if (theta == 0.0) {
        if (h.a <= 0.5)
            throw std::domain_error(
                "marginal_prior_log_density: singular at theta = 0 for a <= 1/2");
        return std::lgamma(h.a - 0.5);
    }
    // integrand lambda^(a+b-1) (theta^2/2 + lambda)^(-(b+1/2)) e^(-lambda);
    // the power at 0 is absorbed by lambda = s^(1/(a+b)).
    const double t2 = 0.5 * theta * theta;
    const double ab = h.a + h.b;
    auto smooth = [&](double lam) {
        return std::pow(t2 + lam, -(h.b + 0.5)) * std::exp(-lam);
    };
    auto left = [&](double s) { return smooth(std::pow(s, 1.0 / ab)); };
    const double head = integrate(left, 0.0, 1.0, spec).value / ab;
    auto right = [&](double lam) { return std::pow(lam, ab - 1.0) * smooth(lam); };
    const double tail =
        integrate(right, 1.0, std::numeric_limits<double>::infinity(), spec).value;
    return std::log(head + tail);
}

double bound_ew(double x, const Hyperparams& h) {
    return std::exp(0.5 * x * x) * h.a / (h.a + h.b + 0.5);
}

double bound_tail_small(double eps, double x, const Hyperparams& h) {
    require_testing_regime(h, "bound_tail_small");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("bound_tail_small: require eps in (0,1)");
    return std::exp(0.5 * x * x) * h.a * eps / ((h.b + 0.5) * (1.0 - eps));
}

double bound_tail_large(double eta, double delta, double x, const Hyperparams& h) {
    require_testing_regime(h, "bound_tail_large");
    if (!(eta > 0.0 && eta < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::domain_error("bound_tail_large: require eta, delta in (0,1)");
    const double log_front = std::log(h.b + 0.5) + h.a * std::log1p(-eta) -
                             std::log(h.a) - (h.b + 0.5) * std::log(eta * delta);
    return std::exp(log_front - 0.5 * eta * (1.0 - delta) * x * x);
}

double type1_upper_bound(const Hyperparams& h) {
    require_testing_regime(h, "type1_upper_bound");
    const double s = h.a + h.b + 0.5;
    const double log_arg = s / (2.0 * h.a);
    if (!(log_arg > 1.0))
        throw std::domain_error("type1_upper_bound: bound formula invalid (log argument <= 1)");
    static const double sqrt_pi = 1.7724538509055160273;
    return (2.0 * std::sqrt(2.0) * h.a) / (sqrt_pi * s) / std::sqrt(std::log(log_arg));
}

double type1_lower_bound(const Hyperparams& h, double xi, double delta) {
    require_testing_regime(h, "type1_lower_bound");
    if (!(xi > 0.0 && xi < 0.5) || !(delta > 0.0 && delta < 1.0))
        throw std::domain_error("type1_lower_bound: require xi in (0,1/2), delta in (0,1)");
    const double log_term = std::log(h.b + 0.5) + h.a * std::log1p(-xi) -
                            std::log(h.a) - (h.b + 0.5) * std::log(xi * delta);
    if (!(log_term > 0.0)) return 0.0;
    return normal_cdf_c(std::sqrt(2.0 / (xi * (1.0 - delta)) * log_term));
}

Type2Bounds type2_bounds(const AsymptoticScheme& scheme, double rho) {
    if (!(rho >= 2.0))
        throw std::domain_error("type2_bounds: require rho >= 2");
    Type2Bounds out;
    out.lower = 2.0 * normal_cdf(std::sqrt(scheme.C)) - 1.0;
    out.upper = 2.0 * normal_cdf(std::sqrt(0.5 * rho * scheme.C)) - 1.0;
    return out;
}

} // namespace nbp
