#pragma once

#include <optional>
#include <string>
#include <vector>

#include "negtm/corpus.hpp"
#include "negtm/metrics.hpp"
#include "negtm/model.hpp"
#include "negtm/negsampling.hpp"

namespace negtm {

struct ExperimentPlan {
    std::string dataset_path;
    std::optional<Corpus> corpus;               // overrides dataset_path when set
    std::string embeddings_path;                // combined/zeroshot models
    std::vector<std::string> models{"prodlda"};          // prodlda, neurallda, gsm,
                                                         // combined, zeroshot
    std::vector<std::string> sampling{"none", "decoder"};// none, decoder, encoder
    std::vector<int> topic_counts{10, 20, 30, 40, 50, 60, 90, 120};
    int seeds = 5;
    int vocab_size = 2000;
    int epochs = 100;
    int batch_size = 64;
    int top_words = 10;
    double learning_rate = 2e-3;
    double dropout = 0.2;
    bool normalized_bow_input = true;
    int neg_top_topics = 1;        // M
    double neg_lambda = 0.5;
    double neg_margin = 1.0;
    int neg_salient_words = 5;     // k
    double neg_eta = 0.5;
    std::string out_dir;           // empty: no files written
    bool force = false;

    void validate() const;
};

ExperimentPlan plan_from_json_file(const std::string& path);

struct AggregateRow {
    std::string model;      // e.g. "prodlda-neg"
    double npmi = 0.0;
    double cv = 0.0;
    double irbo = 0.0;
    std::optional<double> accuracy;
    int completed_runs = 0;
};

struct PlanResult {
    std::vector<MetricReport> runs;
    std::vector<AggregateRow> aggregate;
    std::vector<std::string> warnings;
};

// Display name combining model and sampling mode, e.g. "prodlda-neg".
std::string run_model_name(const std::string& model, const std::string& sampling);

// Train per (model, sampling, T, seed), compute metrics, aggregate as mean
// over topic counts of the per-T median over seeds. Failed runs are skipped
// with a warning. With out_dir set, per-run JSON reports are written under
// out_dir/raw/ (existing keys reused unless plan.force) plus runs.csv and
// aggregate.csv.
PlanResult run_plan(const ExperimentPlan& plan);

// Median-over-seeds then mean-over-T, recomputable from a raw runs table.
std::vector<AggregateRow> aggregate_reports(const std::vector<MetricReport>& runs);

void save_runs_csv(const std::vector<MetricReport>& runs, const std::string& path);
std::vector<MetricReport> load_runs_csv(const std::string& path);
void save_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& dataset,
                        const std::string& path);

struct GridResult {
    int top_topics = 0;
    double lambda = 0.0;
    double objective = 0.0;     // median NPMI at the chosen cell
    std::vector<std::string> warnings;
};

// Exhaustive (M, lambda) search at the plan's first topic count, using
// decoder sampling and median NPMI over the plan's seeds as the objective.
// Ties break to smaller M, then smaller lambda.
GridResult grid_search(const ExperimentPlan& plan, const std::vector<int>& m_set,
                       const std::vector<double>& lambda_set);

struct VocabSweepRow {
    int requested_size = 0;
    int actual_size = 0;
    bool clamped = false;
    std::string model;
    double npmi_mean = 0.0;
    double npmi_variance = 0.0;
};

std::vector<VocabSweepRow> vocab_sweep(const ExperimentPlan& plan, const std::vector<int>& sizes);

struct TimeProfileRow {
    std::string model;
    std::string sampling;
    double seconds_mean = 0.0;
    double seconds_stddev = 0.0;
    double npmi_mean = 0.0;
    double npmi_stddev = 0.0;
};

struct TimeProfilePair {
    std::string model;
    double overhead_pct = 0.0;   // (t_neg - t_vanilla) / t_vanilla * 100
    double npmi_gain_pct = 0.0;
};

struct TimeProfileResult {
    std::vector<TimeProfileRow> rows;
    std::vector<TimeProfilePair> pairs;
};

// Wall-clock training time at the plan's first topic count; vectorization is
// shared across runs and excluded from the timings.
TimeProfileResult time_profile(const ExperimentPlan& plan);

}  // namespace negtm
