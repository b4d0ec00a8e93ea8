#include "nbp/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace nbp {

std::string method_name(Method m) {
    switch (m) {
        case Method::NbpEs: return "nbp-es";
        case Method::NbpReml: return "nbp-reml";
        case Method::NbpUnif: return "nbp-unif";
        case Method::NbpTc: return "nbp-tc";
        case Method::BayesOracle: return "bo";
        case Method::BenjaminiHochberg: return "bh";
    }
    throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "nbp-es") return Method::NbpEs;
    if (name == "nbp-reml") return Method::NbpReml;
    if (name == "nbp-unif") return Method::NbpUnif;
    if (name == "nbp-tc") return Method::NbpTc;
    if (name == "bo") return Method::BayesOracle;
    if (name == "bh") return Method::BenjaminiHochberg;
    throw std::invalid_argument("unknown method: " + name);
}

TwoGroupsData generate_two_groups(const TwoGroupsSpec& spec, RandomStream& stream) {
    TwoGroupsData d;
    d.x.resize(spec.n);
    d.theta.resize(spec.n);
    d.truth.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool signal = stream.uniform() < spec.p;
        d.truth[i] = signal;
        if (signal)
            d.theta[i] = spec.psi * stream.normal();
        else
            d.theta[i] = spec.zeta > 0.0 ? spec.zeta * stream.normal() : 0.0;
        d.x[i] = d.theta[i] + stream.normal();
    }
    return d;
}

ExperimentPlan::ExperimentPlan(TwoGroupsSpec s)
    : spec(s),
      methods{Method::NbpEs, Method::NbpReml, Method::NbpUnif, Method::NbpTc,
              Method::BayesOracle, Method::BenjaminiHochberg} {
    const double dn = static_cast<double>(spec.n);
    b = 0.5 + 1.0 / dn;
    bh_alpha = 1.0 / std::log(dn);
}

namespace {

std::vector<ExperimentRow> run_replicate(const ExperimentPlan& plan, int rep) {
    const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(rep);
    RandomStream data_stream(seed);
    const TwoGroupsData data = generate_two_groups(plan.spec, data_stream);
    const std::size_t n = plan.spec.n;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<ExperimentRow> rows;
    rows.reserve(plan.methods.size());
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
        const Method method = plan.methods[mi];
        ExperimentRow row;
        row.p = plan.spec.p;
        row.method = method_name(method);
        row.replicate = rep;
        row.mp = row.fdr = row.mse = nan;
        row.n_rejections = 0;
        row.runtime_s = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            DecisionReport report;
            std::vector<double> estimate;
            bool has_estimate = true;
            switch (method) {
                case Method::NbpEs:
                case Method::NbpReml: {
                    const double a = method == Method::NbpEs
                                         ? es_estimate(data.x, plan.es)
                                         : reml_estimate(data.x, plan.b, plan.reml);
                    const Hyperparams h(a, plan.b);
                    std::vector<double> w(n);
                    estimate.resize(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        w[i] = shrinkage_weight(data.x[i], h);
                        estimate[i] = w[i] * data.x[i]; // posterior-mean estimator
                    }
                    report = half_threshold(w);
                    break;
                }
                case Method::NbpUnif:
                case Method::NbpTc: {
                    ChainSpec cs = plan.chain;
                    cs.seed = RandomStream(seed).substream(100 + mi).seed();
                    const APrior prior = method == Method::NbpUnif
                                             ? APrior::uniform_default(n)
                                             : APrior::trunc_cauchy_default(n);
                    const PosteriorSummary sum = run_chain(data.x, plan.b, prior, cs);
                    report = half_threshold(sum.shrink_weight);
                    estimate = sum.post_median;
                    break;
                }
                case Method::BayesOracle:
                    report = oracle_decisions(data.x, plan.spec);
                    has_estimate = false;
                    break;
                case Method::BenjaminiHochberg:
                    report = bh_decisions(two_sided_pvalues(data.x), plan.bh_alpha);
                    has_estimate = false;
                    break;
            }
            const std::vector<double>& est = has_estimate ? estimate : data.theta;
            const Metrics m = compute_metrics(report, data.truth, est, data.theta);
            row.mp = m.mp;
            row.fdr = m.fdr;
            row.mse = has_estimate ? m.mse : nan; // BO/BH are rules, not estimators
            row.n_rejections = report.n_rejections;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentPlan& plan) {
    if (plan.replicates < 1)
        throw std::domain_error("run_experiment: require replicates >= 1");
    const int reps = plan.replicates;
    int threads = plan.threads > 0
                      ? plan.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, reps));

    std::vector<std::vector<ExperimentRow>> per_rep(reps);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= reps) return;
            per_rep[r] = run_replicate(plan, r);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<ExperimentRow> rows;
    rows.reserve(static_cast<std::size_t>(reps) * plan.methods.size());
    for (auto& rep_rows : per_rep)
        for (auto& row : rep_rows) rows.push_back(std::move(row));
    return rows;
}

std::vector<double> t_to_z(std::span<const double> t_stats, int df) {
    if (df < 1) throw std::domain_error("t_to_z: require df >= 1");
    std::vector<double> z(t_stats.size());
    const double nu = static_cast<double>(df);
    for (std::size_t i = 0; i < t_stats.size(); ++i) {
        const double t = t_stats[i];
        if (!std::isfinite(t)) throw std::domain_error("t_to_z: t statistics must be finite");
        if (t == 0.0) {
            z[i] = 0.0;
            continue;
        }
        const double tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
        z[i] = t > 0.0 ? -normal_quantile(tail) : normal_quantile(tail);
    }
    return z;
}

// ---------------------------------------------------------------------------
// CSV input
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& s, std::size_t row, std::size_t col,
                    const std::string& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(path + ": row " + std::to_string(row) + ", column " +
                                    std::to_string(col) + ": cannot parse '" + s +
                                    "' as a number");
    }
}

bool looks_numeric(const std::string& s) {
    try {
        std::size_t pos = 0;
        (void)std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

ExpressionMatrix read_expression_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open expression file: " + path);
    ExpressionMatrix m;
    std::string line;
    std::size_t row = 0;
    std::size_t n_cols = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (row == 1) { // header
            if (fields.size() < 2)
                throw std::invalid_argument(path + ": header must list at least one sample");
            n_cols = fields.size();
            continue;
        }
        if (fields.size() != n_cols)
            throw std::invalid_argument(path + ": row " + std::to_string(row) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(n_cols));
        m.gene_ids.push_back(fields[0]);
        std::vector<double> vals(fields.size() - 1);
        for (std::size_t c = 1; c < fields.size(); ++c)
            vals[c - 1] = parse_double(fields[c], row, c + 1, path);
        m.values.push_back(std::move(vals));
    }
    if (m.values.empty()) throw std::invalid_argument(path + ": no gene rows found");
    return m;
}

std::vector<bool> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open labels file: " + path);
    std::vector<bool> cancer;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string v = trim(line);
        if (v.empty()) continue;
        if (row == 1 && v != "control" && v != "cancer") continue; // header
        if (v == "control")
            cancer.push_back(false);
        else if (v == "cancer")
            cancer.push_back(true);
        else
            throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                        ": expected 'control' or 'cancer', got '" + v + "'");
    }
    if (cancer.empty()) throw std::invalid_argument(path + ": no labels found");
    return cancer;
}

std::vector<double> read_single_column_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::vector<double> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (row == 1 && !looks_numeric(fields[0])) continue; // header
        out.push_back(parse_double(fields[0], row, 1, path));
    }
    if (out.empty()) throw std::invalid_argument(path + ": no numeric rows found");
    return out;
}

std::vector<double> two_sample_t_stats(const ExpressionMatrix& expr,
                                       const std::vector<bool>& cancer) {
    const std::size_t m = cancer.size();
    std::size_t m2 = 0;
    for (bool c : cancer) m2 += c ? 1 : 0;
    const std::size_t m1 = m - m2;
    if (m1 < 2 || m2 < 2)
        throw std::invalid_argument("two_sample_t_stats: need at least 2 samples per group");
    std::vector<double> t(expr.values.size());
    for (std::size_t g = 0; g < expr.values.size(); ++g) {
        const auto& v = expr.values[g];
        if (v.size() != m)
            throw std::invalid_argument("two_sample_t_stats: gene " + expr.gene_ids[g] +
                                        " has " + std::to_string(v.size()) +
                                        " samples, labels list " + std::to_string(m));
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) (cancer[j] ? s2 : s1) += v[j];
        const double mean1 = s1 / static_cast<double>(m1);
        const double mean2 = s2 / static_cast<double>(m2);
        double ss = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = v[j] - (cancer[j] ? mean2 : mean1);
            ss += d * d;
        }
        const double sp2 = ss / static_cast<double>(m1 + m2 - 2);
        const double diff = mean2 - mean1; // positive when cancer mean is larger
        if (sp2 == 0.0) {
            if (diff == 0.0) {
                t[g] = 0.0;
                continue;
            }
            throw std::invalid_argument("two_sample_t_stats: gene " + expr.gene_ids[g] +
                                        ": zero pooled variance with nonzero mean difference");
        }
        t[g] = diff / std::sqrt(sp2 * (1.0 / static_cast<double>(m1) +
                                       1.0 / static_cast<double>(m2)));
    }
    return t;
}

ProstateResult prostate_pipeline(const std::string& expression_csv,
                                 const std::string& labels_csv, Method method,
                                 const ChainSpec& chain, double b, double bh_alpha) {
    const ExpressionMatrix expr = read_expression_csv(expression_csv);
    const std::vector<bool> cancer = read_labels_csv(labels_csv);
    if (!expr.values.empty() && expr.values.front().size() != cancer.size())
        throw std::invalid_argument("prostate_pipeline: expression matrix has " +
                                    std::to_string(expr.values.front().size()) +
                                    " sample columns but labels file lists " +
                                    std::to_string(cancer.size()));
    std::size_t m2 = 0;
    for (bool c : cancer) m2 += c ? 1 : 0;
    const int df = static_cast<int>(cancer.size()) - 2;

    const std::vector<double> t = two_sample_t_stats(expr, cancer);
    const std::vector<double> z = t_to_z(t, df);
    const std::size_t n = z.size();
    const double b_eff = b > 0.0 ? b : 0.5 + 1.0 / static_cast<double>(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const DecisionReport bh = bh_decisions(two_sided_pvalues(z), bh_alpha);

    std::vector<double> theta_hat(n, nan);
    std::vector<bool> selected(n, false);
    switch (method) {
        case Method::NbpEs:
        case Method::NbpReml: {
            const double a = method == Method::NbpEs
                                 ? es_estimate(z)
                                 : reml_estimate(z, b_eff);
            const Hyperparams h(a, b_eff);
            for (std::size_t i = 0; i < n; ++i) {
                const double w = shrinkage_weight(z[i], h);
                theta_hat[i] = w * z[i];
                selected[i] = w > 0.5;
            }
            break;
        }
        case Method::NbpUnif:
        case Method::NbpTc: {
            const APrior prior = method == Method::NbpUnif
                                     ? APrior::uniform_default(n)
                                     : APrior::trunc_cauchy_default(n);
            const PosteriorSummary sum = run_chain(z, b_eff, prior, chain);
            for (std::size_t i = 0; i < n; ++i) {
                theta_hat[i] = sum.post_mean[i];
                selected[i] = sum.shrink_weight[i] > 0.5;
            }
            break;
        }
        case Method::BenjaminiHochberg:
            for (std::size_t i = 0; i < n; ++i) selected[i] = bh.reject[i];
            break;
        case Method::BayesOracle:
            throw std::invalid_argument(
                "prostate_pipeline: the Bayes Oracle needs known (p, psi)");
    }

    ProstateResult res;
    res.df = df;
    res.n_selected_bh = bh.n_rejections;
    res.genes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        res.genes[i] = GeneRow{expr.gene_ids[i], z[i], theta_hat[i],
                               static_cast<bool>(selected[i]),
                               static_cast<bool>(bh.reject[i])};
        if (selected[i]) ++res.n_selected;
    }
    std::stable_sort(res.genes.begin(), res.genes.end(),
                     [](const GeneRow& a, const GeneRow& bb) {
                         return std::fabs(a.z_score) > std::fabs(bb.z_score);
                     });
    return res;
}

// ---------------------------------------------------------------------------
// CSV / JSON output
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

void write_experiment_csv(const std::string& path, const std::vector<ExperimentRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << "p,method,replicate,mp,fdr,mse,n_rejections,runtime_s,error\n";
    for (const auto& r : rows) {
        out << fmt(r.p) << ',' << r.method << ',' << r.replicate << ',' << fmt(r.mp) << ','
            << fmt(r.fdr) << ',' << fmt(r.mse) << ',' << r.n_rejections << ','
            << fmt(r.runtime_s) << ',' << r.error << '\n';
    }
}

void write_experiment_json_summary(const std::string& path,
                                   const std::vector<ExperimentRow>& rows) {
    struct Acc {
        double mp = 0, fdr = 0, mse = 0, rej = 0;
        int count = 0, mse_count = 0, errors = 0;
    };
    std::vector<std::pair<std::pair<double, std::string>, Acc>> groups;
    for (const auto& r : rows) {
        const std::pair<double, std::string> key{r.p, r.method};
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, Acc{}});
            it = std::prev(groups.end());
        }
        Acc& a = it->second;
        if (!r.error.empty()) {
            ++a.errors;
            continue;
        }
        a.mp += r.mp;
        a.fdr += r.fdr;
        a.rej += static_cast<double>(r.n_rejections);
        if (std::isfinite(r.mse)) {
            a.mse += r.mse;
            ++a.mse_count;
        }
        ++a.count;
    }
    nlohmann::json j;
    j["groups"] = nlohmann::json::array();
    for (const auto& [key, a] : groups) {
        nlohmann::json g;
        g["p"] = key.first;
        g["method"] = key.second;
        g["rows"] = a.count;
        g["errors"] = a.errors;
        if (a.count > 0) {
            g["mean_mp"] = a.mp / a.count;
            g["mean_fdr"] = a.fdr / a.count;
            g["mean_rejections"] = a.rej / a.count;
        }
        if (a.mse_count > 0) g["mean_mse"] = a.mse / a.mse_count;
        j["groups"].push_back(g);
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

void write_gene_table_csv(const std::string& path, const ProstateResult& result) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << "gene_id,z_score,theta_hat,selected,selected_bh\n";
    for (const auto& g : result.genes) {
        out << g.gene_id << ',' << fmt(g.z_score) << ',' << fmt(g.theta_hat) << ','
            << (g.selected ? 1 : 0) << ',' << (g.selected_bh ? 1 : 0) << '\n';
    }
}

} // namespace nbp
