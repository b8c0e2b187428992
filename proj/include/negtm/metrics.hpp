#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "negtm/corpus.hpp"
#include "negtm/model.hpp"
#include "negtm/tensor.hpp"

namespace negtm {

// Boolean sliding-window co-occurrence counts.
struct CoocTable {
    long window_count = 0;
    int window_size = 0;
    std::unordered_map<std::string, long> word_windows;
    std::map<std::pair<std::string, std::string>, long> pair_windows;   // key sorted

    double p_word(const std::string& w) const;
    double p_pair(const std::string& a, const std::string& b) const;
};

// Windows slide by one token inside each document; documents shorter than
// the window contribute a single whole-document window.
CoocTable build_cooc(const Corpus& corpus, int window_size);

// Pairwise NPMI with epsilon inside both logs. Pairs where a marginal
// probability is zero contribute 0.
double npmi_pair(const CoocTable& cooc, const std::string& a, const std::string& b,
                 double epsilon);

// Mean over topics of the mean over C(t,2) word pairs.
double npmi(const TopicSet& topics, const CoocTable& cooc, double epsilon = 1e-12);

// Per word: NPMI context vector over the topic's words (self included);
// confirmation = cosine against the summed vector; mean over words, then
// over topics.
double cv(const TopicSet& topics, const CoocTable& cooc, double epsilon = 1e-12);

// Truncated, normalized rank-biased overlap of two equal-length lists.
double rbo(const std::vector<std::string>& l1, const std::vector<std::string>& l2, double p);

// 1 - mean pairwise RBO over all C(T,2) unordered topic pairs.
double irbo(const TopicSet& topics, double p = 0.9);

struct TopicMatch {
    int i = 0;
    int j = 0;
    double score = 0.0;
};

// Greedy highest-RBO matching with each index used at most once; ties in
// score break to smaller (i, j).
std::vector<TopicMatch> align_topics(const TopicSet& a, const TopicSet& b, double p = 0.9);

struct SvmConfig {
    double lambda_reg = 1e-4;
    int epochs = 200;
    uint64_t seed = 13;
};

// One-vs-rest linear SVM trained with sub-gradient descent on hinge loss +
// L2; returns test accuracy.
double classify(const Tensor2& theta_train, const std::vector<int>& labels_train,
                const Tensor2& theta_test, const std::vector<int>& labels_test,
                const SvmConfig& config = {});

struct MetricReport {
    std::string model;
    std::string sampling;
    std::string dataset;
    int topic_count = 0;
    uint64_t seed = 0;
    double npmi = 0.0;
    double cv = 0.0;
    double irbo = 0.0;
    std::optional<double> accuracy;
    double train_seconds = 0.0;
};

}  // namespace negtm
