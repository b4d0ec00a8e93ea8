// Command-line driver: simulation grid, shrinkage weights, MCMC summaries,
// the prostate pipeline, and the concentration-bound calculators.
//
// Exit codes: 0 success, 2 input error, 3 numerical error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbp/experiments.hpp"

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty list: " + csv);
    return out;
}

// "lo:hi:step" inclusive grid
std::vector<double> parse_grid(const std::string& s) {
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
        throw std::invalid_argument("grid must be lo:hi:step, got " + s);
    const double lo = std::stod(a), hi = std::stod(b), step = std::stod(c);
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad grid: " + s);
    std::vector<double> out;
    for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(x);
    return out;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    return nbp::RandomStream(base).substream(salt).seed();
}

int cmd_simulate(const std::string& p_grid_str, int n, const std::string& psi_str,
                 double zeta, const std::string& methods_str, int replicates,
                 std::uint64_t seed, double b_opt, double bh_alpha_opt, int iters,
                 int burnin, int thin, int threads, const std::string& out,
                 const std::string& json_out) {
    const std::vector<double> p_grid = parse_list(p_grid_str);
    const double psi = psi_str == "auto" ? std::sqrt(2.0 * std::log(double(n)))
                                         : std::stod(psi_str);
    std::vector<nbp::Method> methods;
    {
        std::stringstream ss(methods_str);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) methods.push_back(nbp::method_from_name(tok));
    }
    if (methods.empty()) throw std::invalid_argument("no methods given");

    std::vector<nbp::ExperimentRow> all;
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        nbp::ExperimentPlan plan(nbp::TwoGroupsSpec(n, p_grid[pi], psi, zeta));
        plan.methods = methods;
        plan.replicates = replicates;
        plan.base_seed = mix_seed(seed, pi); // decorrelated across the grid
        plan.chain.iterations = iters;
        plan.chain.burnin = burnin;
        plan.chain.thin = thin;
        plan.threads = threads;
        if (b_opt > 0.0) plan.b = b_opt;
        if (bh_alpha_opt > 0.0) plan.bh_alpha = bh_alpha_opt;
        auto rows = nbp::run_experiment(plan);
        for (auto& r : rows) all.push_back(std::move(r));
        std::cerr << "p = " << p_grid[pi] << ": " << rows.size() << " rows done\n";
    }
    nbp::write_experiment_csv(out, all);
    if (!json_out.empty()) nbp::write_experiment_json_summary(json_out, all);
    std::cout << "wrote " << all.size() << " rows to " << out << "\n";
    return 0;
}

int cmd_shrink(const std::string& input, const std::string& method, double b,
               const std::string& out) {
    const std::vector<double> z = nbp::read_single_column_csv(input);
    const std::size_t n = z.size();
    const double b_eff = b > 0.0 ? b : 0.5 + 1.0 / double(n);
    double a = 0.0;
    if (method == "es")
        a = nbp::es_estimate(z);
    else if (method == "reml")
        a = nbp::reml_estimate(z, b_eff);
    else if (method.rfind("fixed:", 0) == 0)
        a = std::stod(method.substr(6));
    else
        throw std::invalid_argument("method must be es, reml, or fixed:<a>");
    const nbp::Hyperparams h(a, b_eff);
    std::ofstream os(out);
    if (!os) throw std::invalid_argument("cannot open output file: " + out);
    os << "index,z,weight,reject,theta_hat\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double w = nbp::shrinkage_weight(z[i], h);
        os << i << ',' << fmt(z[i]) << ',' << fmt(w) << ',' << (w > 0.5 ? 1 : 0) << ','
           << fmt(w * z[i]) << '\n';
    }
    std::cout << "a = " << fmt(a) << ", b = " << fmt(b_eff) << ", wrote " << n
              << " rows to " << out << "\n";
    return 0;
}

int cmd_mcmc(const std::string& input, const std::string& prior_name, int iters,
             int burnin, int thin, std::uint64_t seed, double b, double omega,
             const std::string& out) {
    const std::vector<double> z = nbp::read_single_column_csv(input);
    const std::size_t n = z.size();
    const double b_eff = b > 0.0 ? b : 0.5 + 1.0 / double(n);
    nbp::APrior prior = nbp::APrior::uniform_default(n);
    if (prior_name == "tc")
        prior = nbp::APrior::trunc_cauchy_default(n);
    else if (prior_name != "unif")
        throw std::invalid_argument("prior must be unif or tc");
    nbp::ChainSpec spec;
    spec.iterations = iters;
    spec.burnin = burnin;
    spec.thin = thin;
    spec.seed = seed;
    spec.omega = omega;
    const nbp::PosteriorSummary s = nbp::run_chain(z, b_eff, prior, spec);
    std::ofstream os(out);
    if (!os) throw std::invalid_argument("cannot open output file: " + out);
    os << "index,z,post_mean,post_median,shrink_weight,shrink_weight_se,reject\n";
    for (std::size_t i = 0; i < n; ++i)
        os << i << ',' << fmt(z[i]) << ',' << fmt(s.post_mean[i]) << ','
           << fmt(s.post_median[i]) << ',' << fmt(s.shrink_weight[i]) << ','
           << fmt(s.shrink_weight_se[i]) << ',' << (s.shrink_weight[i] > 0.5 ? 1 : 0)
           << '\n';
    std::cout << "a_mean = " << fmt(s.a_mean) << ", mh_accept_rate = "
              << fmt(s.mh_accept_rate) << ", omega_final = " << fmt(s.omega_final)
              << ", wrote " << n << " rows to " << out << "\n";
    return 0;
}

int cmd_prostate(const std::string& expr, const std::string& labels,
                 const std::string& method, double alpha_bh, double b, int iters,
                 int burnin, std::uint64_t seed, const std::string& out) {
    nbp::ChainSpec chain;
    chain.iterations = iters;
    chain.burnin = burnin;
    chain.seed = seed;
    const nbp::ProstateResult res = nbp::prostate_pipeline(
        expr, labels, nbp::method_from_name(method), chain, b, alpha_bh);
    nbp::write_gene_table_csv(out, res);
    std::cout << "selected " << res.n_selected << " genes (" << method << "), "
              << res.n_selected_bh << " under BH at alpha = " << alpha_bh << "; wrote "
              << res.genes.size() << " rows to " << out << "\n";
    return 0;
}

int cmd_bounds(double a, double b, const std::string& x_grid, double eps, double eta,
               double delta, double p, double psi, double rho, const std::string& out) {
    const nbp::Hyperparams h(a, b);
    const std::vector<double> grid = parse_grid(x_grid);
    std::ofstream os(out);
    if (!os) throw std::invalid_argument("cannot open output file: " + out);
    os << "x,ew_quad,ew_bound,pr_below_quad,below_bound,pr_above_quad,above_bound\n";
    for (double x : grid) {
        os << fmt(x) << ',' << fmt(nbp::shrinkage_weight(x, h)) << ','
           << fmt(nbp::bound_ew(x, h)) << ',' << fmt(nbp::kappa_prob_below(eps, x, h)) << ','
           << fmt(nbp::bound_tail_small(eps, x, h)) << ','
           << fmt(nbp::kappa_prob_above(eta, x, h)) << ','
           << fmt(nbp::bound_tail_large(eta, delta, x, h)) << '\n';
    }
    std::cout << "type1_upper_bound = " << fmt(nbp::type1_upper_bound(h)) << "\n";
    std::cout << "type1_lower_bound(xi=0.25, delta=" << delta
              << ") = " << fmt(nbp::type1_lower_bound(h, 0.25, delta)) << "\n";
    if (p > 0.0 && psi > 0.0) {
        const auto scheme = nbp::AsymptoticScheme::from_two_groups(p, psi);
        const auto t2 = nbp::type2_bounds(scheme, rho);
        std::cout << "type2_bounds(C=" << fmt(scheme.C) << ", rho=" << rho
                  << ") = [" << fmt(t2.lower) << ", " << fmt(t2.upper) << "]\n";
    }
    std::cout << "wrote " << grid.size() << " rows to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normal-beta prime shrinkage: testing, estimation, experiments"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "two-groups simulation grid");
    std::string p_grid = "0.01,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5";
    int n = 500;
    std::string psi = "auto";
    double zeta = 0.0;
    std::string methods = "nbp-es,nbp-reml,nbp-unif,nbp-tc,bo,bh";
    int replicates = 20;
    std::uint64_t seed = 1;
    double b = 0.0, bh_alpha = 0.0;
    int iters = 10000, burnin = 5000, thin = 1, threads = 0;
    std::string out = "results.csv", json_out;
    sim->add_option("--p-grid", p_grid, "comma-separated sparsity levels");
    sim->add_option("--n", n, "sample size");
    sim->add_option("--psi", psi, "slab scale or 'auto' = sqrt(2 log n)");
    sim->add_option("--zeta", zeta, "null scale (0 = point mass)");
    sim->add_option("--methods", methods, "comma-separated method list");
    sim->add_option("--replicates", replicates, "replicates per sparsity level");
    sim->add_option("--seed", seed, "base seed");
    sim->add_option("--b", b, "tail shape (default 1/2 + 1/n)");
    sim->add_option("--bh-alpha", bh_alpha, "BH level (default 1/log n)");
    sim->add_option("--iters", iters, "MCMC iterations");
    sim->add_option("--burnin", burnin, "MCMC burn-in");
    sim->add_option("--thin", thin, "MCMC thinning");
    sim->add_option("--threads", threads, "worker threads (0 = auto)");
    sim->add_option("--out", out, "output CSV");
    sim->add_option("--json", json_out, "optional JSON summary");

    // shrink
    auto* shr = app.add_subcommand("shrink", "quadrature shrinkage weights and decisions");
    std::string shr_in, shr_method = "es", shr_out = "weights.csv";
    double shr_b = 0.0;
    shr->add_option("--input", shr_in, "single-column CSV of z-values")->required();
    shr->add_option("--method", shr_method, "es | reml | fixed:<a>");
    shr->add_option("--b", shr_b, "tail shape (default 1/2 + 1/n)");
    shr->add_option("--out", shr_out, "output CSV");

    // mcmc
    auto* mc = app.add_subcommand("mcmc", "hierarchical-Bayes chain summary");
    std::string mc_in, mc_prior = "unif", mc_out = "summary.csv";
    int mc_iters = 10000, mc_burnin = 5000, mc_thin = 1;
    std::uint64_t mc_seed = 1;
    double mc_b = 0.0, mc_omega = 0.1;
    mc->add_option("--input", mc_in, "single-column CSV of z-values")->required();
    mc->add_option("--prior", mc_prior, "unif | tc");
    mc->add_option("--iters", mc_iters, "iterations");
    mc->add_option("--burnin", mc_burnin, "burn-in");
    mc->add_option("--thin", mc_thin, "thinning");
    mc->add_option("--seed", mc_seed, "seed");
    mc->add_option("--b", mc_b, "tail shape (default 1/2 + 1/n)");
    mc->add_option("--omega", mc_omega, "initial MH proposal sd");
    mc->add_option("--out", mc_out, "output CSV");

    // prostate
    auto* pro = app.add_subcommand("prostate", "gene expression pipeline");
    std::string pro_expr, pro_labels, pro_method = "nbp-unif", pro_out = "genes.csv";
    double pro_alpha = 0.10, pro_b = 0.0;
    int pro_iters = 10000, pro_burnin = 5000;
    std::uint64_t pro_seed = 1;
    pro->add_option("--expr", pro_expr, "expression CSV (genes x samples)")->required();
    pro->add_option("--labels", pro_labels, "labels CSV (control/cancer)")->required();
    pro->add_option("--method", pro_method, "nbp-es | nbp-reml | nbp-unif | nbp-tc | bh");
    pro->add_option("--alpha-bh", pro_alpha, "BH level");
    pro->add_option("--b", pro_b, "tail shape (default 1/2 + 1/n)");
    pro->add_option("--iters", pro_iters, "MCMC iterations");
    pro->add_option("--burnin", pro_burnin, "MCMC burn-in");
    pro->add_option("--seed", pro_seed, "seed");
    pro->add_option("--out", pro_out, "output CSV");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "concentration bounds vs quadrature");
    double bnd_a = 0.1, bnd_b = 1.0, bnd_eps = 0.5, bnd_eta = 0.5, bnd_delta = 0.5;
    double bnd_p = 0.0, bnd_psi = 0.0, bnd_rho = 2.1;
    std::string bnd_grid = "-5:5:0.1", bnd_out = "bounds.csv";
    bnd->add_option("--a", bnd_a, "spike shape")->required();
    bnd->add_option("--b", bnd_b, "tail shape")->required();
    bnd->add_option("--x-grid", bnd_grid, "grid lo:hi:step");
    bnd->add_option("--eps", bnd_eps, "epsilon for the lower tail");
    bnd->add_option("--eta", bnd_eta, "eta for the upper tail");
    bnd->add_option("--delta", bnd_delta, "delta for the upper tail");
    bnd->add_option("--p", bnd_p, "signal proportion for type II bounds");
    bnd->add_option("--psi", bnd_psi, "slab scale for type II bounds");
    bnd->add_option("--rho", bnd_rho, "type II bound parameter (>= 2)");
    bnd->add_option("--out", bnd_out, "output CSV");

    try {
        app.parse(argc, argv);
        if (sim->parsed())
            return cmd_simulate(p_grid, n, psi, zeta, methods, replicates, seed, b,
                                bh_alpha, iters, burnin, thin, threads, out, json_out);
        if (shr->parsed()) return cmd_shrink(shr_in, shr_method, shr_b, shr_out);
        if (mc->parsed())
            return cmd_mcmc(mc_in, mc_prior, mc_iters, mc_burnin, mc_thin, mc_seed, mc_b,
                            mc_omega, mc_out);
        if (pro->parsed())
            return cmd_prostate(pro_expr, pro_labels, pro_method, pro_alpha, pro_b,
                                pro_iters, pro_burnin, pro_seed, pro_out);
        if (bnd->parsed())
            return cmd_bounds(bnd_a, bnd_b, bnd_grid, bnd_eps, bnd_eta, bnd_delta, bnd_p,
                              bnd_psi, bnd_rho, bnd_out);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const nbp::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
