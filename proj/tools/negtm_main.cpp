// negtm: train and evaluate neural topic models with negative sampling.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "negtm/corpus.hpp"
#include "negtm/harness.hpp"
#include "negtm/model.hpp"

namespace {

struct CliOptions {
    std::string config;
    std::string dataset;
    std::string embeddings;
    std::vector<std::string> models{"prodlda"};
    std::vector<std::string> neg{"none"};
    std::vector<int> topics{20};
    int seeds = 5;
    double lambda = 0.5;
    int top_topics = 1;
    double margin = 1.0;
    int epochs = 100;
    int vocab_size = 2000;
    std::string out;
    bool force = false;
    std::vector<int> sizes{1000, 2000, 4000, 8000};
    uint64_t seed = 1;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config, "JSON experiment plan (flags override it)");
    cmd->add_option("--dataset", opt.dataset, "TSV corpus: text<TAB>partition[<TAB>label]");
    cmd->add_option("--embeddings", opt.embeddings, "document embedding TSV (id then values)");
    cmd->add_option("--model", opt.models, "model(s): prodlda neurallda gsm combined zeroshot")
        ->delimiter(',');
    cmd->add_option("--neg", opt.neg, "sampling mode(s): none decoder encoder")->delimiter(',');
    cmd->add_option("--topics", opt.topics, "topic count(s)")->delimiter(',');
    cmd->add_option("--seeds", opt.seeds, "seeds per configuration");
    cmd->add_option("--lambda", opt.lambda, "triplet loss weight");
    cmd->add_option("--M", opt.top_topics, "top topics zeroed when perturbing theta");
    cmd->add_option("--margin", opt.margin, "triplet loss margin");
    cmd->add_option("--epochs", opt.epochs, "training epochs");
    cmd->add_option("--vocab-size", opt.vocab_size, "vocabulary truncation size");
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_flag("--force", opt.force, "re-run configurations with existing reports");
}

negtm::ExperimentPlan make_plan(const CLI::App* cmd, const CliOptions& opt) {
    negtm::ExperimentPlan plan;
    if (!opt.config.empty()) plan = negtm::plan_from_json_file(opt.config);
    auto set = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (set("--dataset") || plan.dataset_path.empty()) plan.dataset_path = opt.dataset;
    if (set("--embeddings")) plan.embeddings_path = opt.embeddings;
    if (set("--model") || opt.config.empty()) plan.models = opt.models;
    if (set("--neg") || opt.config.empty()) plan.sampling = opt.neg;
    if (set("--topics") || opt.config.empty()) plan.topic_counts = opt.topics;
    if (set("--seeds") || opt.config.empty()) plan.seeds = opt.seeds;
    if (set("--lambda") || opt.config.empty()) plan.neg_lambda = opt.lambda;
    if (set("--M") || opt.config.empty()) plan.neg_top_topics = opt.top_topics;
    if (set("--margin") || opt.config.empty()) plan.neg_margin = opt.margin;
    if (set("--epochs") || opt.config.empty()) plan.epochs = opt.epochs;
    if (set("--vocab-size") || opt.config.empty()) plan.vocab_size = opt.vocab_size;
    if (set("--out")) plan.out_dir = opt.out;
    if (opt.force) plan.force = true;
    if (plan.dataset_path.empty() && !plan.corpus)
        throw CLI::ValidationError("--dataset", "a corpus is required");
    return plan;
}

int cmd_train(const CLI::App* cmd, const CliOptions& opt) {
    negtm::PlanResult result = negtm::run_plan(make_plan(cmd, opt));
    std::cout << "model,npmi,cv,irbo,accuracy,runs\n";
    for (const auto& row : result.aggregate) {
        std::cout << row.model << ',' << row.npmi << ',' << row.cv << ',' << row.irbo << ',';
        if (row.accuracy) std::cout << *row.accuracy;
        std::cout << ',' << row.completed_runs << '\n';
    }
    return result.runs.empty() ? 1 : 0;
}

int cmd_eval(const CLI::App* cmd, const CliOptions& opt) {
    // Single train+evaluate run that also dumps topics and per-document theta.
    negtm::ExperimentPlan plan = make_plan(cmd, opt);
    if (plan.out_dir.empty()) throw CLI::ValidationError("--out", "eval requires --out");
    plan.models = {plan.models.front()};
    plan.sampling = {plan.sampling.front()};
    plan.topic_counts = {plan.topic_counts.front()};
    plan.seeds = 1;
    std::filesystem::create_directories(plan.out_dir);

    negtm::Corpus corpus = plan.corpus ? *plan.corpus : negtm::load_corpus(plan.dataset_path);
    negtm::Vocabulary vocab = negtm::build_vocabulary(corpus, plan.vocab_size);
    negtm::PlanResult result = negtm::run_plan(plan);
    if (result.runs.empty()) {
        std::cerr << "eval run failed\n";
        return 1;
    }
    const negtm::MetricReport& rep = result.runs.front();
    std::cout << "model=" << rep.model << " T=" << rep.topic_count << " npmi=" << rep.npmi
              << " cv=" << rep.cv << " irbo=" << rep.irbo;
    if (rep.accuracy) std::cout << " accuracy=" << *rep.accuracy;
    std::cout << " train_seconds=" << rep.train_seconds << '\n';

    // Re-train the same configuration to export theta; run_plan keeps only metrics.
    negtm::NtmConfig config;
    config.num_topics = plan.topic_counts.front();
    config.vocab_size = vocab.size();
    config.epochs = plan.epochs;
    config.seed = 1;
    negtm::NegSamplingConfig neg;
    neg.mode = plan.sampling.front() == "decoder"   ? negtm::SamplingMode::decoder
               : plan.sampling.front() == "encoder" ? negtm::SamplingMode::encoder
                                                    : negtm::SamplingMode::none;
    neg.top_topics = plan.neg_top_topics;
    neg.lambda = plan.neg_lambda;
    neg.margin = plan.neg_margin;
    if (plan.models.front() == "prodlda" || plan.models.front() == "neurallda" ||
        plan.models.front() == "gsm") {
        if (plan.models.front() == "neurallda") config.decoder = negtm::DecoderVariant::neurallda;
        if (plan.models.front() == "gsm") config.decoder = negtm::DecoderVariant::gsm;
        negtm::DocMatrix counts = negtm::vectorize(corpus, vocab, negtm::VectorKind::bow_count);
        negtm::DocMatrix norm =
            negtm::vectorize(corpus, vocab, negtm::VectorKind::bow_normalized);
        negtm::TrainData data;
        std::vector<int> train_rows;
        for (int r = 0; r < counts.values.rows; ++r)
            if (corpus.partitions[counts.doc_ids[r]] == negtm::Partition::train)
                train_rows.push_back(r);
        auto gather = [&](const negtm::Tensor2& src) {
            negtm::Tensor2 out(static_cast<int>(train_rows.size()), src.cols);
            for (size_t i = 0; i < train_rows.size(); ++i)
                for (int c = 0; c < src.cols; ++c)
                    out(static_cast<int>(i), c) = src(train_rows[i], c);
            return out;
        };
        data.x_in = gather(config.normalized_bow_input ? norm.values : counts.values);
        data.x_count = gather(counts.values);
        data.x_bow = gather(norm.values);
        if (neg.mode == negtm::SamplingMode::encoder) {
            negtm::DocMatrix tfidf = negtm::vectorize(corpus, vocab, negtm::VectorKind::tfidf);
            data.x_tfidf = gather(tfidf.values);
        }
        negtm::NtmModel model(config, neg);
        model.train(data);
        std::filesystem::path out_dir(plan.out_dir);
        negtm::save_topics_json(model.top_words(plan.top_words, vocab),
                                (out_dir / "topics.json").string());
        negtm::Tensor2 theta = model.infer_theta(
            config.normalized_bow_input ? norm.values : counts.values);
        negtm::save_theta_tsv(theta, counts.doc_ids, (out_dir / "theta.tsv").string());
        model.save_checkpoint((out_dir / "model.json").string());
        std::cout << "wrote topics.json, theta.tsv, model.json to " << plan.out_dir << '\n';
    } else {
        std::cout << "theta export for contextual models: use train with --out\n";
    }
    return 0;
}

int cmd_sweep(const CLI::App* cmd, const CliOptions& opt) {
    negtm::ExperimentPlan plan = make_plan(cmd, opt);
    auto rows = negtm::vocab_sweep(plan, opt.sizes);
    std::cout << "vocab_size,actual_size,model,npmi_mean,npmi_variance,clamped\n";
    for (const auto& row : rows)
        std::cout << row.requested_size << ',' << row.actual_size << ',' << row.model << ','
                  << row.npmi_mean << ',' << row.npmi_variance << ','
                  << (row.clamped ? "yes" : "no") << '\n';
    return 0;
}

int cmd_grid(const CLI::App* cmd, const CliOptions& opt) {
    negtm::ExperimentPlan plan = make_plan(cmd, opt);
    negtm::GridResult best =
        negtm::grid_search(plan, {1, 2, 3}, {0.1, 0.25, 0.5, 0.75, 1.0});
    for (const std::string& w : best.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "best M=" << best.top_topics << " lambda=" << best.lambda
              << " median_npmi=" << best.objective << '\n';
    return 0;
}

int cmd_profile(const CLI::App* cmd, const CliOptions& opt) {
    negtm::ExperimentPlan plan = make_plan(cmd, opt);
    negtm::TimeProfileResult result = negtm::time_profile(plan);
    std::cout << "model,sampling,seconds_mean,seconds_stddev,npmi_mean,npmi_stddev\n";
    for (const auto& row : result.rows)
        std::cout << row.model << ',' << row.sampling << ',' << row.seconds_mean << ','
                  << row.seconds_stddev << ',' << row.npmi_mean << ',' << row.npmi_stddev << '\n';
    for (const auto& pair : result.pairs)
        std::cout << "# " << pair.model << ": overhead " << pair.overhead_pct << "%, npmi delta "
                  << pair.npmi_gain_pct << "%\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neural topic models with negative sampling"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* train = app.add_subcommand("train", "run an experiment plan");
    CLI::App* eval = app.add_subcommand("eval", "single run; dump topics, theta, checkpoint");
    CLI::App* sweep = app.add_subcommand("sweep", "vocabulary size sweep");
    CLI::App* grid = app.add_subcommand("grid", "grid search over M and lambda");
    CLI::App* profile = app.add_subcommand("profile", "wall-clock training profile");
    for (CLI::App* cmd : {train, eval, sweep, grid, profile}) add_common_flags(cmd, opt);
    sweep->add_option("--sizes", opt.sizes, "vocabulary sizes to sweep")->delimiter(',');

    try {
        app.parse(argc, argv);
        if (*train) return cmd_train(train, opt);
        if (*eval) return cmd_eval(eval, opt);
        if (*sweep) return cmd_sweep(sweep, opt);
        if (*grid) return cmd_grid(grid, opt);
        if (*profile) return cmd_profile(profile, opt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
