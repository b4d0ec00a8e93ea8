#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "nbp/experiments.hpp"

using namespace nbp;
using namespace nbp_test;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/nbp_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("two-groups data generation") {
    SUBCASE("degenerate mixture at p -> 0") {
        RandomStream s(1);
        const TwoGroupsData d = generate_two_groups(TwoGroupsSpec(100, 1e-12, 3.53), s);
        for (std::size_t i = 0; i < 100; ++i) {
            CHECK(!d.truth[i]);
            CHECK(d.theta[i] == 0.0);
            CHECK(std::isfinite(d.x[i]));
        }
    }
    SUBCASE("moment checks at n = 1e5") {
        RandomStream s(2);
        const std::size_t n = 100000;
        const double p = 0.2, psi = 3.53;
        const TwoGroupsData d = generate_two_groups(TwoGroupsSpec(n, p, psi), s);

        std::vector<double> signal_x;
        double pooled_sum = 0.0, pooled_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pooled_sum += d.x[i];
            pooled_sq += d.x[i] * d.x[i];
            if (d.truth[i]) signal_x.push_back(d.x[i]);
        }
        const double frac = static_cast<double>(signal_x.size()) / n;
        const double frac_se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::fabs(frac - p) <= 3.0 * frac_se);

        const double sig_var = sample_variance(signal_x);
        const double sig_var_se =
            std::sqrt(2.0 / (signal_x.size() - 1.0)) * (1.0 + psi * psi);
        CHECK(std::fabs(sig_var - (1.0 + psi * psi)) <= 3.0 * sig_var_se);

        // pooled mean ~ 0 and second moment ~ (1-p) + p (1+psi^2)
        const double m2 = (1.0 - p) + p * (1.0 + psi * psi);
        const double pooled_mean_se = std::sqrt(m2 / n);
        CHECK(std::fabs(pooled_sum / n) <= 3.0 * pooled_mean_se);
        // fourth-moment-based se for the second moment, Gaussian-mixture scale
        const double m4 = 3.0 * ((1.0 - p) + p * std::pow(1.0 + psi * psi, 2.0));
        const double m2_se = std::sqrt((m4 - m2 * m2) / n);
        CHECK(std::fabs(pooled_sq / n - m2) <= 3.0 * m2_se);
    }
    SUBCASE("nearly-sparse nulls with zeta > 0") {
        RandomStream s(3);
        const std::size_t n = 100000;
        const TwoGroupsData d = generate_two_groups(TwoGroupsSpec(n, 0.1, 3.53, 0.1), s);
        std::vector<double> null_theta;
        for (std::size_t i = 0; i < n; ++i)
            if (!d.truth[i]) null_theta.push_back(d.theta[i]);
        const double sd = std::sqrt(sample_variance(null_theta));
        CHECK(sd == doctest::Approx(0.1).epsilon(0.02));
    }
}

TEST_CASE("experiment harness") {
    TwoGroupsSpec spec(120, 0.2, 3.1);
    ExperimentPlan plan(spec);
    plan.methods = {Method::NbpEs, Method::BayesOracle, Method::BenjaminiHochberg};
    plan.replicates = 3;
    plan.base_seed = 42;
    plan.threads = 2;

    const auto rows = run_experiment(plan);
    REQUIRE(rows.size() == 9);
    // fixed row order: replicate-major, then method in plan order
    for (int r = 0; r < 3; ++r) {
        CHECK(rows[3 * r].method == "nbp-es");
        CHECK(rows[3 * r + 1].method == "bo");
        CHECK(rows[3 * r + 2].method == "bh");
        for (int m = 0; m < 3; ++m) CHECK(rows[3 * r + m].replicate == r);
    }
    for (const auto& row : rows) {
        CHECK(row.error.empty());
        CHECK(row.p == doctest::Approx(0.2));
        CHECK(row.mp >= 0.0);
        CHECK(row.mp <= 1.0);
        CHECK(row.fdr >= 0.0);
        CHECK(row.fdr <= 1.0);
        CHECK(row.runtime_s >= 0.0);
        if (row.method == "nbp-es")
            CHECK(std::isfinite(row.mse));
        else
            CHECK(!std::isfinite(row.mse)); // decision rules carry no estimate
    }

    // deterministic re-run
    const auto rows2 = run_experiment(plan);
    REQUIRE(rows2.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].mp == rows2[i].mp);
        CHECK(rows[i].fdr == rows2[i].fdr);
        CHECK(rows[i].n_rejections == rows2[i].n_rejections);
    }
}

TEST_CASE("shrinkage weights approximate inclusion probabilities when sparse") {
    // property-level restatement of the figure comparison at p = 0.05
    RandomStream s(11);
    const TwoGroupsSpec spec(500, 0.05, 3.53);
    const TwoGroupsData d = generate_two_groups(spec, s);
    const double a_hat = es_estimate(d.x);
    const Hyperparams h(a_hat, 0.5 + 1.0 / 500.0);
    double total = 0.0;
    for (double x : d.x)
        total += std::fabs(shrinkage_weight(x, h) - inclusion_prob(x, spec.p, spec.psi));
    CHECK(total / 500.0 <= 0.15);
}

TEST_CASE("t to z transform") {
    const std::vector<double> t = {-4.0, -1.0, 0.0, 0.5, 4.0};
    const auto z = t_to_z(t, 100);
    CHECK(z[2] == 0.0);
    for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i] > z[i - 1]);
    CHECK(z[0] == doctest::Approx(-z[4]).epsilon(1e-12));
    // t has heavier tails than the normal at df = 100
    CHECK(std::fabs(z[4]) < 4.0);
    // CDF comparison oracle: Phi(z) must equal F_t(t)
    CHECK(normal_cdf(z[4]) == doctest::Approx(student_t_cdf(4.0, 100)).epsilon(1e-9));
    CHECK_THROWS_AS(t_to_z(std::vector<double>{std::nan("")}, 100), std::domain_error);
    CHECK_THROWS_AS(t_to_z(t, 0), std::domain_error);
}

TEST_CASE("expression matrix parsing and t statistics") {
    TempFile expr("expr.csv",
                  "gene,s1,s2,s3,s4,s5,s6\n"
                  "gUP,1.0,1.1,0.9,2.0,2.1,1.9\n"
                  "gNULL,1.0,2.0,1.5,1.0,2.0,1.5\n");
    TempFile labels("labels.csv", "label\ncontrol\ncontrol\ncontrol\ncancer\ncancer\ncancer\n");

    const ExpressionMatrix m = read_expression_csv(expr.path);
    REQUIRE(m.gene_ids.size() == 2);
    CHECK(m.gene_ids[0] == "gUP");
    REQUIRE(m.values[0].size() == 6);

    const auto cancer = read_labels_csv(labels.path);
    REQUIRE(cancer.size() == 6);
    CHECK(!cancer[0]);
    CHECK(cancer[5]);

    const auto t = two_sample_t_stats(m, cancer);
    CHECK(t[0] > 0.0); // positive when the cancer mean exceeds control
    CHECK(t[1] == 0.0); // identical group means with nonzero variance

    // hand check of the pooled statistic for gUP
    const double mean1 = 1.0, mean2 = 2.0;
    const double ss = 0.02 + 0.02; // within-group sums of squares
    const double sp2 = ss / 4.0;
    const double expected = (mean2 - mean1) / std::sqrt(sp2 * (1.0 / 3.0 + 1.0 / 3.0));
    CHECK(t[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("malformed inputs carry row context") {
    TempFile bad("bad_expr.csv", "gene,s1,s2\ng1,1.0\n");
    try {
        read_expression_csv(bad.path);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    TempFile badnum("badnum_expr.csv", "gene,s1,s2\ng1,1.0,oops\n");
    try {
        read_expression_csv(badnum.path);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }
    TempFile badlab("bad_labels.csv", "label\ncontrol\nmouse\n");
    CHECK_THROWS_AS(read_labels_csv(badlab.path), std::invalid_argument);
}

TEST_CASE("prostate pipeline on a synthetic matrix") {
    // 12 genes x 10 samples; three strong signals, one exact-null gene
    std::ostringstream expr;
    expr << "gene";
    for (int sUP = 1; sUP <= 10; ++sUP) expr << ",s" << sUP;
    expr << "\n";
    RandomStream gen(99);
    for (int g = 0; g < 12; ++g) {
        expr << "g" << g;
        const double shift = (g < 3) ? 4.0 : 0.0;
        for (int sample = 0; sample < 10; ++sample) {
            double v = gen.normal() * 0.3;
            if (sample >= 5) v += shift;
            if (g == 11) v = ((sample % 5) % 2 == 0) ? 1.0 : 2.0; // same pattern per group
            expr << "," << v;
        }
        expr << "\n";
    }
    std::ostringstream lab;
    lab << "label\n";
    for (int sUP = 0; sUP < 10; ++sUP) lab << (sUP < 5 ? "control" : "cancer") << "\n";
    TempFile expr_f("prost_expr.csv", expr.str());
    TempFile lab_f("prost_labels.csv", lab.str());

    ChainSpec chain;
    chain.iterations = 2000;
    chain.burnin = 1000;
    chain.seed = 5;
    const ProstateResult res =
        prostate_pipeline(expr_f.path, lab_f.path, Method::NbpEs, chain, 0.0, 0.10);
    REQUIRE(res.genes.size() == 12);
    CHECK(res.df == 8);
    // sorted by |z| descending
    for (std::size_t i = 1; i < res.genes.size(); ++i)
        CHECK(std::fabs(res.genes[i - 1].z_score) >= std::fabs(res.genes[i].z_score));
    // the exact-null gene maps to z = 0 and is never selected
    bool found_null = false;
    for (const auto& g : res.genes) {
        if (g.gene_id == "g11") {
            found_null = true;
            CHECK(g.z_score == 0.0);
            CHECK(!g.selected);
            CHECK(!g.selected_bh);
        }
    }
    CHECK(found_null);
    CHECK(res.n_selected >= 3); // the three strong signals survive selection

    CHECK_THROWS_AS(prostate_pipeline(expr_f.path, lab_f.path, Method::BayesOracle, chain),
                    std::invalid_argument);
}

TEST_CASE("csv writers") {
    std::vector<ExperimentRow> rows(1);
    rows[0] = ExperimentRow{0.2, "nbp-es", 0, 0.125, 0.0625,
                            0.123456789012345678, 7, 0.5, ""};
    TempFile sink("rows.csv", "");
    write_experiment_csv(sink.path, rows);
    std::ifstream in(sink.path);
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "p,method,replicate,mp,fdr,mse,n_rejections,runtime_s,error");
    std::getline(in, line);
    // 17 significant digits round-trip exactly
    const auto mse_pos = line.find(",0.12345678901234568");
    CHECK(mse_pos != std::string::npos);

    TempFile js("rows.json", "");
    write_experiment_json_summary(js.path, rows);
    std::ifstream jin(js.path);
    std::stringstream buf;
    buf << jin.rdbuf();
    CHECK(buf.str().find("\"mean_mp\"") != std::string::npos);
}

TEST_CASE("single column reader accepts optional header") {
    TempFile with_header("col1.csv", "z\n0.5\n-1.25\n");
    const auto a = read_single_column_csv(with_header.path);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == 0.5);
    CHECK(a[1] == -1.25);
    TempFile without("col2.csv", "0.5\n-1.25\n3.5\n");
    const auto b = read_single_column_csv(without.path);
    REQUIRE(b.size() == 3);
    CHECK(b[2] == 3.5);
    TempFile empty("col3.csv", "z\n");
    CHECK_THROWS_AS(read_single_column_csv(empty.path), std::invalid_argument);
}
