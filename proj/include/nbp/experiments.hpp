#ifndef NBP_EXPERIMENTS_HPP
#define NBP_EXPERIMENTS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbp/estimators.hpp"
#include "nbp/samplers.hpp"
#include "nbp/testing.hpp"

namespace nbp {

enum class Method { NbpEs, NbpReml, NbpUnif, NbpTc, BayesOracle, BenjaminiHochberg };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct TwoGroupsData {
    std::vector<double> x;
    std::vector<double> theta;
    std::vector<bool> truth; // true = slab component
};

/// Draw theta from (1-p) delta_0 + p N(0, psi^2) (or N(0, zeta^2) nulls when
/// zeta > 0) and x = theta + N(0,1).
TwoGroupsData generate_two_groups(const TwoGroupsSpec& spec, RandomStream& stream);

struct ExperimentPlan {
    TwoGroupsSpec spec;
    std::vector<Method> methods;
    int replicates = 20;
    std::uint64_t base_seed = 1; // replicate r uses seed base_seed + r
    ChainSpec chain{};
    double b;        // tail shape, default 1/2 + 1/n
    double bh_alpha; // BH level, default 1/log n
    EsConfig es{};
    RemlConfig reml{};
    int threads = 0; // 0 = hardware concurrency

    explicit ExperimentPlan(TwoGroupsSpec s);
};

struct ExperimentRow {
    double p;
    std::string method;
    int replicate;
    double mp;
    double fdr;
    double mse; // NaN for the BO/BH decision rules (not estimators)
    std::size_t n_rejections;
    double runtime_s;
    std::string error; // empty on success
};

/// One row per (method, replicate); methods within a replicate share the
/// generated data. Deterministic given the plan. Replicates run in parallel.
std::vector<ExperimentRow> run_experiment(const ExperimentPlan& plan);

/// z_i = Phi^{-1}(F_{t,df}(t_i)); strictly increasing, 0 at 0.
std::vector<double> t_to_z(std::span<const double> t_stats, int df);

struct ExpressionMatrix {
    std::vector<std::string> gene_ids;
    std::vector<std::vector<double>> values; // rows = genes, columns = samples
};

/// Expression CSV: header row, gene-id first column, one column per sample.
ExpressionMatrix read_expression_csv(const std::string& path);

/// Labels CSV: header row, one line per sample with value control or cancer.
/// Returns flags, true = cancer.
std::vector<bool> read_labels_csv(const std::string& path);

/// Pooled equal-variance two-sample t statistics per gene, positive when the
/// cancer-group mean exceeds the control mean. df = m1 + m2 - 2.
std::vector<double> two_sample_t_stats(const ExpressionMatrix& expr,
                                       const std::vector<bool>& cancer);

struct GeneRow {
    std::string gene_id;
    double z_score;
    double theta_hat; // NaN when the method does not estimate effects
    bool selected;
    bool selected_bh;
};

struct ProstateResult {
    std::vector<GeneRow> genes; // sorted by |z_score| descending
    std::size_t n_selected = 0;
    std::size_t n_selected_bh = 0;
    int df = 0;
};

/// t-tests, z-transform, selection by the requested method, plus the BH
/// baseline at bh_alpha. b <= 0 selects the default 1/2 + 1/n.
ProstateResult prostate_pipeline(const std::string& expression_csv,
                                 const std::string& labels_csv, Method method,
                                 const ChainSpec& chain, double b = 0.0,
                                 double bh_alpha = 0.10);

// --- CSV output (UTF-8, header row, '.' decimal separator, 17 significant digits) ---

std::vector<double> read_single_column_csv(const std::string& path);
void write_experiment_csv(const std::string& path, const std::vector<ExperimentRow>& rows);
void write_experiment_json_summary(const std::string& path,
                                   const std::vector<ExperimentRow>& rows);
void write_gene_table_csv(const std::string& path, const ProstateResult& result);

} // namespace nbp

#endif
