#include "negtm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace negtm {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentPlan::validate() const {
    if (seeds < 1) throw std::invalid_argument("ExperimentPlan: need >= 1 seed");
    if (topic_counts.empty()) throw std::invalid_argument("ExperimentPlan: need topic counts");
    if (!std::is_sorted(topic_counts.begin(), topic_counts.end()))
        throw std::invalid_argument("ExperimentPlan: topic counts must be ascending");
    if (models.empty() || sampling.empty())
        throw std::invalid_argument("ExperimentPlan: need models and sampling modes");
    if (epochs < 1) throw std::invalid_argument("ExperimentPlan: epochs must be >= 1");
}

ExperimentPlan plan_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan file: " + path);
    json j = json::parse(in);
    ExperimentPlan plan;
    if (j.contains("dataset")) plan.dataset_path = j["dataset"].get<std::string>();
    if (j.contains("embeddings")) plan.embeddings_path = j["embeddings"].get<std::string>();
    if (j.contains("models")) plan.models = j["models"].get<std::vector<std::string>>();
    if (j.contains("sampling")) plan.sampling = j["sampling"].get<std::vector<std::string>>();
    if (j.contains("topics")) plan.topic_counts = j["topics"].get<std::vector<int>>();
    if (j.contains("seeds")) plan.seeds = j["seeds"].get<int>();
    if (j.contains("vocab_size")) plan.vocab_size = j["vocab_size"].get<int>();
    if (j.contains("epochs")) plan.epochs = j["epochs"].get<int>();
    if (j.contains("batch")) plan.batch_size = j["batch"].get<int>();
    if (j.contains("top_words")) plan.top_words = j["top_words"].get<int>();
    if (j.contains("lr")) plan.learning_rate = j["lr"].get<double>();
    if (j.contains("dropout")) plan.dropout = j["dropout"].get<double>();
    if (j.contains("normalized_bow")) plan.normalized_bow_input = j["normalized_bow"].get<bool>();
    if (j.contains("M")) plan.neg_top_topics = j["M"].get<int>();
    if (j.contains("lambda")) plan.neg_lambda = j["lambda"].get<double>();
    if (j.contains("margin")) plan.neg_margin = j["margin"].get<double>();
    if (j.contains("k")) plan.neg_salient_words = j["k"].get<int>();
    if (j.contains("eta")) plan.neg_eta = j["eta"].get<double>();
    if (j.contains("out")) plan.out_dir = j["out"].get<std::string>();
    if (j.contains("force")) plan.force = j["force"].get<bool>();
    return plan;
}

std::string run_model_name(const std::string& model, const std::string& sampling) {
    if (sampling == "none") return model;
    if (sampling == "decoder") return model + "-neg";
    if (sampling == "encoder") return model + "-encneg";
    throw std::invalid_argument("unknown sampling mode: " + sampling);
}

namespace {

struct PlanData {
    Corpus corpus;
    Vocabulary vocab;
    DocMatrix counts;        // retained docs x V
    Tensor2 bow_norm;
    Tensor2 tfidf;
    Tensor2 embeddings;      // retained docs x D (may be empty)
    int emb_dim = 0;
    std::vector<int> train_rows;
    std::vector<int> test_rows;
};

PlanData prepare_data(const ExperimentPlan& plan, int vocab_size) {
    PlanData data;
    data.corpus = plan.corpus ? *plan.corpus : load_corpus(plan.dataset_path);
    data.vocab = build_vocabulary(data.corpus, vocab_size);
    data.counts = vectorize(data.corpus, data.vocab, VectorKind::bow_count);
    DocMatrix norm = vectorize(data.corpus, data.vocab, VectorKind::bow_normalized);
    DocMatrix tfidf = vectorize(data.corpus, data.vocab, VectorKind::tfidf);
    data.bow_norm = std::move(norm.values);
    data.tfidf = std::move(tfidf.values);
    for (int r = 0; r < data.counts.values.rows; ++r) {
        if (data.corpus.partitions[data.counts.doc_ids[r]] == Partition::train)
            data.train_rows.push_back(r);
        else
            data.test_rows.push_back(r);
    }
    bool needs_embeddings = std::any_of(plan.models.begin(), plan.models.end(),
                                        [](const std::string& m) {
                                            return m == "combined" || m == "zeroshot";
                                        });
    if (needs_embeddings) {
        if (plan.embeddings_path.empty())
            throw std::runtime_error("plan uses contextual models but no embeddings file given");
        auto table = load_embeddings(plan.embeddings_path, data.corpus.num_docs());
        if (table.empty()) throw std::runtime_error("embeddings file is empty");
        data.emb_dim = static_cast<int>(table.begin()->second.size());
        data.embeddings = Tensor2(data.counts.values.rows, data.emb_dim);
        for (int r = 0; r < data.counts.values.rows; ++r) {
            auto it = table.find(data.counts.doc_ids[r]);
            if (it == table.end())
                throw std::runtime_error("missing embedding for doc " +
                                         std::to_string(data.counts.doc_ids[r]));
            for (int c = 0; c < data.emb_dim; ++c) data.embeddings(r, c) = it->second[c];
        }
    }
    return data;
}

Tensor2 gather_rows(const Tensor2& src, const std::vector<int>& rows) {
    Tensor2 out(static_cast<int>(rows.size()), src.cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < src.cols; ++c) out(static_cast<int>(i), c) = src(rows[i], c);
    return out;
}

Tensor2 concat_cols(const Tensor2& a, const Tensor2& b) {
    Tensor2 out(a.rows, a.cols + b.cols);
    for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < a.cols; ++c) out(r, c) = a(r, c);
        for (int c = 0; c < b.cols; ++c) out(r, a.cols + c) = b(r, c);
    }
    return out;
}

void model_kind(const std::string& model, DecoderVariant& decoder, InputKind& input) {
    if (model == "prodlda") {
        decoder = DecoderVariant::prodlda;
        input = InputKind::bow;
    } else if (model == "neurallda") {
        decoder = DecoderVariant::neurallda;
        input = InputKind::bow;
    } else if (model == "gsm") {
        decoder = DecoderVariant::gsm;
        input = InputKind::bow;
    } else if (model == "combined") {
        decoder = DecoderVariant::contextual;
        input = InputKind::combined;
    } else if (model == "zeroshot") {
        decoder = DecoderVariant::contextual;
        input = InputKind::contextual;
    } else {
        throw std::invalid_argument("unknown model: " + model);
    }
}

SamplingMode sampling_mode(const std::string& sampling) {
    if (sampling == "none") return SamplingMode::none;
    if (sampling == "decoder") return SamplingMode::decoder;
    if (sampling == "encoder") return SamplingMode::encoder;
    throw std::invalid_argument("unknown sampling mode: " + sampling);
}

Tensor2 encoder_input(const PlanData& data, InputKind input, bool normalized,
                      const std::vector<int>& rows) {
    switch (input) {
        case InputKind::bow:
            return gather_rows(normalized ? data.bow_norm : data.counts.values, rows);
        case InputKind::contextual:
            return gather_rows(data.embeddings, rows);
        case InputKind::combined:
            return concat_cols(
                gather_rows(normalized ? data.bow_norm : data.counts.values, rows),
                gather_rows(data.embeddings, rows));
    }
    throw std::logic_error("encoder_input: bad kind");
}

struct SingleRun {
    MetricReport report;
    TopicSet topics;
};

SingleRun run_single(const PlanData& data, const ExperimentPlan& plan, const std::string& model,
                     const std::string& sampling, int topic_count, uint64_t seed) {
    DecoderVariant decoder;
    InputKind input;
    model_kind(model, decoder, input);

    NtmConfig config;
    config.num_topics = topic_count;
    config.vocab_size = data.vocab.size();
    config.embedding_dim = data.emb_dim;
    config.decoder = decoder;
    config.input = input;
    config.normalized_bow_input = plan.normalized_bow_input;
    config.epochs = plan.epochs;
    config.batch_size = plan.batch_size;
    config.seed = seed;
    config.dropout = plan.dropout;
    config.lr = plan.learning_rate;

    NegSamplingConfig neg;
    neg.mode = sampling_mode(sampling);
    neg.top_topics = plan.neg_top_topics;
    neg.lambda = plan.neg_lambda;
    neg.margin = plan.neg_margin;
    neg.salient_words = plan.neg_salient_words;
    neg.eta = plan.neg_eta;

    NtmModel ntm(config, neg);

    TrainData train_data;
    train_data.x_in = encoder_input(data, input, plan.normalized_bow_input, data.train_rows);
    train_data.x_count = gather_rows(data.counts.values, data.train_rows);
    train_data.x_bow = gather_rows(data.bow_norm, data.train_rows);
    if (neg.mode == SamplingMode::encoder)
        train_data.x_tfidf = gather_rows(data.tfidf, data.train_rows);

    auto start = std::chrono::steady_clock::now();
    ntm.train(train_data);
    auto stop = std::chrono::steady_clock::now();

    SingleRun run;
    run.topics = ntm.top_words(std::min(plan.top_words, data.vocab.size()), data.vocab);
    CoocTable npmi_cooc = build_cooc(data.corpus, 10);
    CoocTable cv_cooc = build_cooc(data.corpus, 110);

    MetricReport& rep = run.report;
    rep.model = run_model_name(model, sampling);
    rep.sampling = sampling;
    rep.dataset = data.corpus.name;
    rep.topic_count = topic_count;
    rep.seed = seed;
    rep.train_seconds = std::chrono::duration<double>(stop - start).count();
    rep.npmi = npmi(run.topics, npmi_cooc);
    rep.cv = cv(run.topics, cv_cooc);
    rep.irbo = irbo(run.topics);

    if (data.corpus.has_labels() && !data.test_rows.empty()) {
        Tensor2 theta_train = ntm.infer_theta(
            encoder_input(data, input, plan.normalized_bow_input, data.train_rows));
        Tensor2 theta_test = ntm.infer_theta(
            encoder_input(data, input, plan.normalized_bow_input, data.test_rows));
        std::vector<int> lab_train, lab_test;
        for (int r : data.train_rows) lab_train.push_back(data.corpus.labels[data.counts.doc_ids[r]]);
        for (int r : data.test_rows) lab_test.push_back(data.corpus.labels[data.counts.doc_ids[r]]);
        bool all_labeled = std::all_of(lab_train.begin(), lab_train.end(),
                                       [](int l) { return l >= 0; }) &&
                           std::all_of(lab_test.begin(), lab_test.end(),
                                       [](int l) { return l >= 0; });
        if (all_labeled) rep.accuracy = classify(theta_train, lab_train, theta_test, lab_test);
    }
    return run;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

json report_to_json(const MetricReport& r) {
    json j{{"model", r.model},     {"sampling", r.sampling},   {"dataset", r.dataset},
           {"topic_count", r.topic_count}, {"seed", r.seed},   {"npmi", r.npmi},
           {"cv", r.cv},           {"irbo", r.irbo},           {"train_seconds", r.train_seconds}};
    if (r.accuracy) j["accuracy"] = *r.accuracy;
    return j;
}

MetricReport report_from_json(const json& j) {
    MetricReport r;
    r.model = j.at("model").get<std::string>();
    r.sampling = j.at("sampling").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.topic_count = j.at("topic_count").get<int>();
    r.seed = j.at("seed").get<uint64_t>();
    r.npmi = j.at("npmi").get<double>();
    r.cv = j.at("cv").get<double>();
    r.irbo = j.at("irbo").get<double>();
    r.train_seconds = j.at("train_seconds").get<double>();
    if (j.contains("accuracy")) r.accuracy = j.at("accuracy").get<double>();
    return r;
}

}  // namespace

std::vector<AggregateRow> aggregate_reports(const std::vector<MetricReport>& runs) {
    // model -> T -> per-seed reports
    std::map<std::string, std::map<int, std::vector<const MetricReport*>>> grouped;
    for (const MetricReport& r : runs) grouped[r.model][r.topic_count].push_back(&r);

    std::vector<AggregateRow> rows;
    for (const auto& [model, by_t] : grouped) {
        AggregateRow row;
        row.model = model;
        std::vector<double> npmi_m, cv_m, irbo_m, acc_m;
        bool has_acc = true;
        for (const auto& [t, reps] : by_t) {
            std::vector<double> npmis, cvs, irbos, accs;
            for (const MetricReport* r : reps) {
                npmis.push_back(r->npmi);
                cvs.push_back(r->cv);
                irbos.push_back(r->irbo);
                if (r->accuracy)
                    accs.push_back(*r->accuracy);
                else
                    has_acc = false;
            }
            npmi_m.push_back(median(npmis));
            cv_m.push_back(median(cvs));
            irbo_m.push_back(median(irbos));
            if (has_acc) acc_m.push_back(median(accs));
            row.completed_runs += static_cast<int>(reps.size());
        }
        row.npmi = mean(npmi_m);
        row.cv = mean(cv_m);
        row.irbo = mean(irbo_m);
        if (has_acc && !acc_m.empty()) row.accuracy = mean(acc_m);
        rows.push_back(std::move(row));
    }
    return rows;
}

void save_runs_csv(const std::vector<MetricReport>& runs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write runs csv: " + path);
    out.precision(17);
    out << "model,dataset,T,seed,npmi,cv,irbo,accuracy,train_seconds\n";
    for (const MetricReport& r : runs) {
        out << r.model << ',' << r.dataset << ',' << r.topic_count << ',' << r.seed << ','
            << r.npmi << ',' << r.cv << ',' << r.irbo << ',';
        if (r.accuracy) out << *r.accuracy;
        out << ',' << r.train_seconds << '\n';
    }
}

std::vector<MetricReport> load_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open runs csv: " + path);
    std::vector<MetricReport> runs;
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        while (fields.size() < 9) fields.push_back("");
        MetricReport r;
        r.model = fields[0];
        r.dataset = fields[1];
        r.topic_count = std::stoi(fields[2]);
        r.seed = std::stoull(fields[3]);
        r.npmi = std::stod(fields[4]);
        r.cv = std::stod(fields[5]);
        r.irbo = std::stod(fields[6]);
        if (!fields[7].empty()) r.accuracy = std::stod(fields[7]);
        if (!fields[8].empty()) r.train_seconds = std::stod(fields[8]);
        runs.push_back(std::move(r));
    }
    return runs;
}

void save_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& dataset,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write aggregate csv: " + path);
    out.precision(17);
    out << "model,dataset,npmi,cv,irbo,accuracy,completed_runs\n";
    for (const AggregateRow& r : rows) {
        out << r.model << ',' << dataset << ',' << r.npmi << ',' << r.cv << ',' << r.irbo << ',';
        if (r.accuracy) out << *r.accuracy;
        out << ',' << r.completed_runs << '\n';
    }
}

PlanResult run_plan(const ExperimentPlan& plan) {
    plan.validate();
    PlanData data = prepare_data(plan, plan.vocab_size);

    fs::path raw_dir;
    if (!plan.out_dir.empty()) {
        raw_dir = fs::path(plan.out_dir) / "raw";
        fs::create_directories(raw_dir);
    }

    PlanResult result;
    // Sampling modes innermost: paired vanilla/neg runs execute back to back,
    // which keeps their wall-clock comparison fair under machine-load drift.
    for (const std::string& model : plan.models) {
        for (int t : plan.topic_counts) {
            for (int s = 0; s < plan.seeds; ++s) {
                for (const std::string& sampling : plan.sampling) {
                    uint64_t seed = static_cast<uint64_t>(s) + 1;
                    std::string key = run_model_name(model, sampling) + "_T" + std::to_string(t) +
                                      "_seed" + std::to_string(seed);
                    fs::path report_path = raw_dir / (key + ".json");
                    if (!plan.out_dir.empty() && !plan.force && fs::exists(report_path)) {
                        std::ifstream in(report_path);
                        result.runs.push_back(report_from_json(json::parse(in)));
                        continue;
                    }
                    try {
                        SingleRun run = run_single(data, plan, model, sampling, t, seed);
                        if (!plan.out_dir.empty()) {
                            std::ofstream out(report_path);
                            out << report_to_json(run.report).dump();
                            save_topics_json(run.topics,
                                             (raw_dir / (key + "_topics.json")).string());
                        }
                        result.runs.push_back(std::move(run.report));
                    } catch (const std::exception& e) {
                        result.warnings.push_back("run " + key + " failed: " + e.what());
                    }
                }
            }
        }
    }
    result.aggregate = aggregate_reports(result.runs);
    if (!plan.out_dir.empty()) {
        save_runs_csv(result.runs, (fs::path(plan.out_dir) / "runs.csv").string());
        save_aggregate_csv(result.aggregate, data.corpus.name,
                           (fs::path(plan.out_dir) / "aggregate.csv").string());
    }
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return result;
}

GridResult grid_search(const ExperimentPlan& plan, const std::vector<int>& m_set,
                       const std::vector<double>& lambda_set) {
    if (m_set.empty() || lambda_set.empty())
        throw std::invalid_argument("grid_search: empty grid");
    plan.validate();
    PlanData data = prepare_data(plan, plan.vocab_size);
    int topic_count = plan.topic_counts.front();
    std::string model = plan.models.front();

    std::vector<int> ms = m_set;
    std::vector<double> lambdas = lambda_set;
    std::sort(ms.begin(), ms.end());
    std::sort(lambdas.begin(), lambdas.end());

    GridResult best;
    bool found = false;
    for (int m : ms) {
        for (double lambda : lambdas) {
            ExperimentPlan cell = plan;
            cell.neg_top_topics = m;
            cell.neg_lambda = lambda;
            std::vector<double> npmis;
            try {
                for (int s = 0; s < plan.seeds; ++s) {
                    SingleRun run = run_single(data, cell, model, "decoder", topic_count,
                                               static_cast<uint64_t>(s) + 1);
                    npmis.push_back(run.report.npmi);
                }
            } catch (const std::exception& e) {
                best.warnings.push_back("grid cell M=" + std::to_string(m) +
                                        " lambda=" + std::to_string(lambda) +
                                        " failed: " + e.what());
                continue;
            }
            double objective = median(npmis);
            // ascending enumeration makes strict > implement the
            // smaller-M-then-smaller-lambda tie rule
            if (!found || objective > best.objective) {
                found = true;
                best.top_topics = m;
                best.lambda = lambda;
                best.objective = objective;
            }
        }
    }
    if (!found) throw std::runtime_error("grid_search: every cell failed");
    return best;
}

std::vector<VocabSweepRow> vocab_sweep(const ExperimentPlan& plan, const std::vector<int>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("vocab_sweep: no sizes");
    plan.validate();
    Corpus corpus = plan.corpus ? *plan.corpus : load_corpus(plan.dataset_path);
    std::set<std::string> unique;
    for (const auto& doc : corpus.documents) unique.insert(doc.begin(), doc.end());
    int unique_words = static_cast<int>(unique.size());

    std::vector<VocabSweepRow> rows;
    for (int size : sizes) {
        ExperimentPlan sub = plan;
        sub.corpus = corpus;
        sub.vocab_size = std::min(size, unique_words);
        sub.out_dir.clear();
        PlanResult res = run_plan(sub);
        std::map<std::string, std::vector<double>> npmis;
        for (const MetricReport& r : res.runs) npmis[r.model].push_back(r.npmi);
        for (const auto& [model, vals] : npmis) {
            VocabSweepRow row;
            row.requested_size = size;
            row.actual_size = sub.vocab_size;
            row.clamped = size > unique_words;
            row.model = model;
            row.npmi_mean = mean(vals);
            double sd = sample_stddev(vals);
            row.npmi_variance = sd * sd;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

TimeProfileResult time_profile(const ExperimentPlan& plan) {
    plan.validate();
    PlanData data = prepare_data(plan, plan.vocab_size);
    int topic_count = plan.topic_counts.front();

    TimeProfileResult result;
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> means;
    for (const std::string& model : plan.models) {
        for (const std::string& sampling : plan.sampling) {
            std::vector<double> times, npmis;
            for (int s = 0; s < plan.seeds; ++s) {
                SingleRun run = run_single(data, plan, model, sampling, topic_count,
                                           static_cast<uint64_t>(s) + 1);
                times.push_back(run.report.train_seconds);
                npmis.push_back(run.report.npmi);
            }
            TimeProfileRow row;
            row.model = model;
            row.sampling = sampling;
            row.seconds_mean = mean(times);
            row.seconds_stddev = sample_stddev(times);
            row.npmi_mean = mean(npmis);
            row.npmi_stddev = sample_stddev(npmis);
            means[{model, sampling}] = {row.seconds_mean, row.npmi_mean};
            result.rows.push_back(std::move(row));
        }
    }
    for (const std::string& model : plan.models) {
        auto vanilla = means.find({model, "none"});
        auto neg = means.find({model, "decoder"});
        if (vanilla == means.end() || neg == means.end()) continue;
        TimeProfilePair pair;
        pair.model = model;
        pair.overhead_pct = 100.0 * (neg->second.first - vanilla->second.first) /
                            vanilla->second.first;
        pair.npmi_gain_pct = vanilla->second.second != 0.0
                                 ? 100.0 * (neg->second.second - vanilla->second.second) /
                                       std::fabs(vanilla->second.second)
                                 : 0.0;
        result.pairs.push_back(std::move(pair));
    }
    return result;
}

}  // namespace negtm
