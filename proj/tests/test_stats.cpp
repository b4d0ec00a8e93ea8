#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "nbp/stats.hpp"

using namespace nbp;
using namespace nbp_test;

TEST_CASE("log_gamma basic values") {
    CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
    // factorial oracle: Gamma(10) = 9!
    double fact = 1.0;
    for (int k = 2; k <= 9; ++k) fact *= k;
    CHECK(log_gamma(10.0) == doctest::Approx(std::log(fact)).epsilon(1e-13));
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
}

TEST_CASE("normal cdf/pdf/quantile") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));

    // bisection oracle on normal_cdf for the 97.5% point
    double lo = 1.5, hi = 2.5;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < 0.975 ? lo : hi) = mid;
    }
    CHECK(normal_quantile(0.975) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));

    // round trip in probability
    for (double q : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9})
        CHECK(std::fabs(normal_cdf(normal_quantile(q)) - q) <= 1e-10);

    // identity quantile(cdf(x)) = x on [-8, 8]; for x > 0 evaluate through the
    // lower tail, where doubles retain full relative precision
    for (double x = -8.0; x <= 8.0 + 1e-9; x += 0.25) {
        const double back = x <= 0.0 ? normal_quantile(normal_cdf(x))
                                     : -normal_quantile(normal_cdf(-x));
        CHECK(std::fabs(back - x) <= 1e-10);
    }

    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("student t cdf") {
    CHECK(student_t_cdf(0.0, 100) == doctest::Approx(0.5).epsilon(1e-15));
    for (double t : {-3.0, -0.7, 0.2, 1.0, 4.5})
        CHECK(student_t_cdf(t, 100) + student_t_cdf(-t, 100) ==
              doctest::Approx(1.0).epsilon(1e-12));

    // quadrature oracle on the t density, df = 100
    const int df = 100;
    const double nu = df;
    const double logc =
        std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI);
    auto dens = [&](double u) {
        return std::exp(logc - 0.5 * (nu + 1.0) * std::log1p(u * u / nu));
    };
    const double tail = integrate(dens, 0.0, 1.984).value;
    CHECK(student_t_cdf(1.984, df) == doctest::Approx(0.5 + tail).epsilon(1e-10));
    CHECK(student_t_cdf(1.984, df) == doctest::Approx(0.975).epsilon(2e-4));

    // monotone on a grid
    double prev = 0.0;
    for (double t = -6.0; t <= 6.0; t += 0.5) {
        const double v = student_t_cdf(t, 7);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(student_t_cdf(1.0, 0), std::domain_error);
}

TEST_CASE("random stream reproducibility and substreams") {
    RandomStream s1(42), s2(42);
    for (int i = 0; i < 200; ++i) {
        CHECK(s1.uniform() == s2.uniform());
        CHECK(s1.normal() == s2.normal());
        CHECK(s1.gamma(1.7, 2.0) == s2.gamma(1.7, 2.0));
        CHECK(sample_gig(s1, 4.0, 2.0, 0.0) == sample_gig(s2, 4.0, 2.0, 0.0));
        CHECK(sample_truncated_normal(s1, 0.5, 0.1, 0.0, 1.0) ==
              sample_truncated_normal(s2, 0.5, 0.1, 0.0, 1.0));
    }
    RandomStream parent(7);
    RandomStream a = parent.substream(1), b = parent.substream(2);
    int differ = 0;
    for (int i = 0; i < 20; ++i) differ += (a.uniform() != b.uniform());
    CHECK(differ == 20);
}

TEST_CASE("gamma and inverse gamma samplers") {
    RandomStream s(101);
    const int n = 100000;

    SUBCASE("inverse gamma mean, shape 3 scale 2") {
        std::vector<double> d(n);
        for (auto& v : d) v = sample_inverse_gamma(s, 3.0, 2.0);
        CHECK(std::fabs(mean(d) - 1.0) <= 3.0 * mean_se(d));
    }
    SUBCASE("inverse gamma support at shape slightly above 1") {
        for (int i = 0; i < 1000; ++i) CHECK(sample_inverse_gamma(s, 0.502 + 0.5, 1.0) > 0.0);
    }
    SUBCASE("inverse gamma KS against quadrature CDF, shape 2 scale 4") {
        std::vector<double> d(n);
        for (auto& v : d) v = sample_inverse_gamma(s, 2.0, 4.0);
        // density x^(-3) e^(-4/x) * 4^2 / Gamma(2)
        auto dens = [](double x) {
            return 16.0 * std::pow(x, -3.0) * std::exp(-4.0 / x);
        };
        std::sort(d.begin(), d.end());
        double acc = 0.0, prev = 0.0, ks = 0.0;
        const double dn = static_cast<double>(n);
        for (int i = 0; i < n; i += 100) {
            acc += integrate(dens, prev, d[i]).value;
            prev = d[i];
            ks = std::max(ks, std::fabs((i + 1.0) / dn - acc));
            ks = std::max(ks, std::fabs(acc - i / dn));
        }
        CHECK(ks < 0.01);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(sample_inverse_gamma(s, 0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(sample_inverse_gamma(s, 1.0, -1.0), std::domain_error);
    }
}

namespace {

// quadrature CDF check of GIG draws at every `step`-th order statistic
double gig_ks(std::vector<double> d, double c, double dd, double p, int step) {
    auto dens = [&](double x) {
        return std::exp((p - 1.0) * std::log(x) - 0.5 * (c / x + dd * x));
    };
    const double z = integrate(dens, 0.0, std::numeric_limits<double>::infinity()).value;
    std::sort(d.begin(), d.end());
    double acc = 0.0, prev = 0.0, ks = 0.0;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size(); i += step) {
        acc += integrate(dens, prev, d[i]).value;
        prev = d[i];
        const double f = acc / z;
        ks = std::max(ks, std::fabs((i + 1.0) / n - f));
        ks = std::max(ks, std::fabs(f - i / n));
    }
    return ks;
}

} // namespace

TEST_CASE("generalized inverse Gaussian sampler") {
    RandomStream s(202);
    const int n = 100000;

    SUBCASE("degenerate c = 0 routes to Gamma(1.5, 1)") {
        std::vector<double> d(n);
        for (auto& v : d) v = sample_gig(s, 0.0, 2.0, 1.5);
        CHECK(std::fabs(mean(d) - 1.5) <= 3.0 * mean_se(d));
        auto cdf = [](double x) { return incomplete_gamma_p(1.5, x); };
        CHECK(ks_statistic(d, cdf) < 0.01);
    }
    SUBCASE("degenerate d = 0 routes to InverseGamma(2, 2)") {
        std::vector<double> d(n);
        for (auto& v : d) v = sample_gig(s, 4.0, 0.0, -2.0);
        CHECK(std::fabs(mean(d) - 2.0) <= 3.0 * mean_se(d));
        auto cdf = [](double x) { return incomplete_gamma_q(2.0, 2.0 / x); };
        CHECK(ks_statistic(d, cdf) < 0.01);
    }
    SUBCASE("general case mean matches the Bessel-ratio moment (quadrature)") {
        const double c = 4.0, dd = 2.0, p = 0.0;
        auto dens = [&](double x) { return std::exp(-0.5 * (c / x + dd * x)) / x; };
        auto xdens = [&](double x) { return std::exp(-0.5 * (c / x + dd * x)); };
        const double inf = std::numeric_limits<double>::infinity();
        const double m_quad = integrate(xdens, 0.0, inf).value / integrate(dens, 0.0, inf).value;
        // same moment through the Bessel-function identity
        const double om = std::sqrt(c * dd);
        const double m_bessel = std::sqrt(c / dd) * std::cyl_bessel_k(1.0, om) /
                                std::cyl_bessel_k(0.0, om);
        CHECK(m_quad == doctest::Approx(m_bessel).epsilon(1e-8));
        std::vector<double> d(n);
        for (auto& v : d) v = sample_gig(s, c, dd, p);
        CHECK(std::fabs(mean(d) - m_quad) <= 3.0 * mean_se(d));
    }
    SUBCASE("KS across the three internal branches") {
        std::vector<double> d(n);
        // ratio-of-uniforms without shift
        for (auto& v : d) v = sample_gig(s, 4.0, 2.0, 0.0);
        CHECK(gig_ks(d, 4.0, 2.0, 0.0, 200) < 0.01);
        // ratio-of-uniforms with shift (omega > 3)
        for (auto& v : d) v = sample_gig(s, 8.0, 2.0, 0.3);
        CHECK(gig_ks(d, 8.0, 2.0, 0.3, 200) < 0.01);
        // large order (lambda > 2) also uses the shifted region
        for (auto& v : d) v = sample_gig(s, 1.0, 2.0, 2.7);
        CHECK(gig_ks(d, 1.0, 2.0, 2.7, 200) < 0.01);
        // small-omega three-piece envelope
        for (auto& v : d) v = sample_gig(s, 1e-4, 2.0, 0.2);
        CHECK(gig_ks(d, 1e-4, 2.0, 0.2, 200) < 0.01);
        // negative order through the reciprocal map, small omega
        for (auto& v : d) v = sample_gig(s, 1e-3, 2.0, -0.3);
        CHECK(gig_ks(d, 1e-3, 2.0, -0.3, 200) < 0.01);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(sample_gig(s, 0.0, 0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(sample_gig(s, 0.0, 2.0, -1.0), std::domain_error);
        CHECK_THROWS_AS(sample_gig(s, 2.0, 0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(sample_gig(s, -1.0, 2.0, 1.0), std::domain_error);
    }
}

TEST_CASE("truncated normal sampler") {
    RandomStream s(303);
    SUBCASE("support") {
        for (int i = 0; i < 5000; ++i) {
            const double v = sample_truncated_normal(s, 0.5, 0.1, 0.002, 1.0);
            CHECK(v >= 0.002);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("far tail concentrates near the nearer bound") {
        std::vector<double> d(20000);
        for (auto& v : d) v = sample_truncated_normal(s, -10.0, 1.0, 0.0, 1.0);
        for (double v : d) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(mean(d) < 0.2); // Exp(10)-like decay from 0
    }
    SUBCASE("near-uniform when sd dominates the interval") {
        std::vector<double> d(100000);
        for (auto& v : d) v = sample_truncated_normal(s, 0.5, 10.0, 0.0, 1.0);
        CHECK(std::fabs(mean(d) - 0.5) <= 3.0 * mean_se(d));
    }
    CHECK_THROWS_AS(sample_truncated_normal(s, 0.0, 1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(sample_truncated_normal(s, 0.0, 0.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("quadrature battery of known integrals") {
    const double inf = std::numeric_limits<double>::infinity();
    struct Item {
        std::function<double(double)> f;
        double lo, hi, truth;
    };
    const std::vector<Item> battery = {
        {[](double) { return 1.0; }, 0.0, 1.0, 1.0},
        {[](double x) { return x * x; }, 0.0, 1.0, 1.0 / 3.0},
        // endpoint-singular integrand x^(-1/2) via the substitution x = u^2
        {[](double u) { return 2.0; }, 0.0, 1.0, 2.0},
        // endpoint-singular integrand handled by adaptive refinement
        {[](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
        // 1/sqrt(1-x^2) via the substitution 1-x = u^2
        {[](double u) { return 2.0 / std::sqrt(2.0 - u * u); }, 0.0, 1.0, M_PI / 2.0},
        {[](double x) { return std::exp(-0.5 * x * x); }, 0.0, inf, std::sqrt(M_PI / 2.0)},
        {[](double x) { return x * std::exp(-x); }, 0.0, inf, 1.0},
        {[](double x) { return std::exp(-x * x); }, -inf, inf, std::sqrt(M_PI)},
        {[](double x) { return std::sin(x); }, 0.0, M_PI, 2.0},
        {[](double x) { return 1.0 / (1e-4 + (x - 0.5) * (x - 0.5)); }, 0.0, 1.0,
         200.0 * std::atan(50.0)},
    };
    QuadratureSpec spec; // defaults: abs 1e-10, rel 1e-8
    for (const auto& item : battery) {
        const auto r = integrate(item.f, item.lo, item.hi, spec);
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(item.truth));
        CHECK(std::fabs(r.value - item.truth) <= std::max(tol, r.err_est));
        CHECK(std::fabs(r.value - item.truth) <= 1e-7 * std::max(1.0, std::fabs(item.truth)));
    }
}

TEST_CASE("quadrature error reporting") {
    // Gaussian integral recomputed against the erfc oracle
    const auto r = integrate([](double x) { return std::exp(-0.5 * x * x); }, 0.0, 6.0);
    const double oracle = std::sqrt(2.0 * M_PI) * (normal_cdf(6.0) - 0.5);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(r.err_est >= std::fabs(r.value - oracle));

    // refusing to converge must carry the best estimate
    QuadratureSpec tight;
    tight.abs_tol = 1e-300;
    tight.rel_tol = 1e-300;
    tight.max_subdivisions = 5;
    try {
        integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, tight);
        CHECK(false);
    } catch (const NumericalError& e) {
        CHECK(std::isfinite(e.best_estimate));
        CHECK(e.error_estimate > 0.0);
    }
}
