#include "negtm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace negtm {

double CoocTable::p_word(const std::string& w) const {
    auto it = word_windows.find(w);
    return it == word_windows.end() ? 0.0 : static_cast<double>(it->second) / window_count;
}

double CoocTable::p_pair(const std::string& a, const std::string& b) const {
    if (a == b) return p_word(a);   // a window containing w co-occurs with itself
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = pair_windows.find(key);
    return it == pair_windows.end() ? 0.0 : static_cast<double>(it->second) / window_count;
}

CoocTable build_cooc(const Corpus& corpus, int window_size) {
    if (window_size < 1) throw std::invalid_argument("build_cooc: window_size must be >= 1");
    CoocTable table;
    table.window_size = window_size;
    for (const auto& doc : corpus.documents) {
        int len = static_cast<int>(doc.size());
        if (len == 0) continue;
        int first = 0;
        int last = std::max(0, len - window_size);   // inclusive
        for (int start = first; start <= last; ++start) {
            int end = std::min(start + window_size, len);
            std::set<std::string> present(doc.begin() + start, doc.begin() + end);
            ++table.window_count;
            for (auto it = present.begin(); it != present.end(); ++it) {
                ++table.word_windows[*it];
                for (auto jt = std::next(it); jt != present.end(); ++jt)
                    ++table.pair_windows[{*it, *jt}];
            }
        }
    }
    return table;
}

double npmi_pair(const CoocTable& cooc, const std::string& a, const std::string& b,
                 double epsilon) {
    double pa = cooc.p_word(a);
    double pb = cooc.p_word(b);
    if (pa == 0.0 || pb == 0.0) return 0.0;
    double pab = cooc.p_pair(a, b);
    if (pab == 0.0) return -1.0;   // epsilon -> 0 limit of the formula below
    return std::log((pab + epsilon) / (pa * pb)) / (-std::log(pab + epsilon));
}

double npmi(const TopicSet& topics, const CoocTable& cooc, double epsilon) {
    if (topics.topics.empty()) throw std::invalid_argument("npmi: no topics");
    double total = 0.0;
    for (const auto& words : topics.topics) {
        int t = static_cast<int>(words.size());
        if (t < 2) throw std::invalid_argument("npmi: need at least 2 words per topic");
        double sum = 0.0;
        for (int i = 0; i < t; ++i)
            for (int j = i + 1; j < t; ++j) sum += npmi_pair(cooc, words[i], words[j], epsilon);
        total += sum / (t * (t - 1) / 2.0);
    }
    return total / topics.topics.size();
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cv(const TopicSet& topics, const CoocTable& cooc, double epsilon) {
    if (topics.topics.empty()) throw std::invalid_argument("cv: no topics");
    double total = 0.0;
    for (const auto& words : topics.topics) {
        int t = static_cast<int>(words.size());
        if (t < 2) throw std::invalid_argument("cv: need at least 2 words per topic");
        std::vector<std::vector<double>> vecs(t, std::vector<double>(t, 0.0));
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j) vecs[i][j] = npmi_pair(cooc, words[i], words[j], epsilon);
        std::vector<double> sum(t, 0.0);
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j) sum[j] += vecs[i][j];
        double topic_score = 0.0;
        for (int i = 0; i < t; ++i) topic_score += cosine(vecs[i], sum);
        total += topic_score / t;
    }
    return total / topics.topics.size();
}

double rbo(const std::vector<std::string>& l1, const std::vector<std::string>& l2, double p) {
    if (l1.size() != l2.size()) throw std::invalid_argument("rbo: lists must have equal length");
    if (l1.empty()) throw std::invalid_argument("rbo: empty lists");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("rbo: require 0 < p < 1");
    auto check_dup = [](const std::vector<std::string>& l) {
        std::set<std::string> seen(l.begin(), l.end());
        if (seen.size() != l.size()) throw std::invalid_argument("rbo: duplicate within a list");
    };
    check_dup(l1);
    check_dup(l2);

    int t = static_cast<int>(l1.size());
    std::set<std::string> s1, s2;
    double sum = 0.0;
    double pw = 1.0;   // p^(d-1)
    int overlap = 0;
    for (int d = 1; d <= t; ++d) {
        const std::string& a = l1[d - 1];
        const std::string& b = l2[d - 1];
        if (a == b) {
            ++overlap;
        } else {
            if (s2.count(a)) ++overlap;
            if (s1.count(b)) ++overlap;
        }
        s1.insert(a);
        s2.insert(b);
        sum += pw * overlap / d;
        pw *= p;
    }
    return (1.0 - p) * sum / (1.0 - std::pow(p, t));
}

double irbo(const TopicSet& topics, double p) {
    int t = static_cast<int>(topics.topics.size());
    if (t < 2) throw std::invalid_argument("irbo: need at least 2 topics");
    double sum = 0.0;
    for (int i = 0; i < t; ++i)
        for (int j = i + 1; j < t; ++j) sum += rbo(topics.topics[i], topics.topics[j], p);
    return 1.0 - sum / (t * (t - 1) / 2.0);
}

std::vector<TopicMatch> align_topics(const TopicSet& a, const TopicSet& b, double p) {
    if (a.topics.empty() || b.topics.empty())
        throw std::invalid_argument("align_topics: empty topic set");
    std::vector<TopicMatch> all;
    for (int i = 0; i < static_cast<int>(a.topics.size()); ++i)
        for (int j = 0; j < static_cast<int>(b.topics.size()); ++j)
            all.push_back({i, j, rbo(a.topics[i], b.topics[j], p)});
    std::sort(all.begin(), all.end(), [](const TopicMatch& x, const TopicMatch& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<char> used_i(a.topics.size(), 0), used_j(b.topics.size(), 0);
    std::vector<TopicMatch> picked;
    for (const TopicMatch& m : all) {
        if (used_i[m.i] || used_j[m.j]) continue;
        used_i[m.i] = used_j[m.j] = 1;
        picked.push_back(m);
    }
    return picked;
}

double classify(const Tensor2& theta_train, const std::vector<int>& labels_train,
                const Tensor2& theta_test, const std::vector<int>& labels_test,
                const SvmConfig& config) {
    int n = theta_train.rows;
    int dim = theta_train.cols;
    if (static_cast<int>(labels_train.size()) != n || theta_test.cols != dim ||
        static_cast<int>(labels_test.size()) != theta_test.rows)
        throw std::invalid_argument("classify: shape mismatch");
    int classes = 0;
    for (int l : labels_train) classes = std::max(classes, l + 1);
    if (classes < 2) throw std::invalid_argument("classify: need at least 2 classes");

    // Pegasos-style one-vs-rest: w gets an extra bias feature.
    std::vector<std::vector<double>> w(classes, std::vector<double>(dim + 1, 0.0));
    std::mt19937_64 gen(config.seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    long step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), gen);
        for (int idx : order) {
            ++step;
            double lr = 1.0 / (config.lambda_reg * (step + 1.0 / config.lambda_reg));
            for (int cls = 0; cls < classes; ++cls) {
                double y = labels_train[idx] == cls ? 1.0 : -1.0;
                double score = w[cls][dim];
                for (int c = 0; c < dim; ++c) score += w[cls][c] * theta_train(idx, c);
                double shrink = 1.0 - lr * config.lambda_reg;
                for (double& v : w[cls]) v *= shrink;
                if (y * score < 1.0) {
                    for (int c = 0; c < dim; ++c) w[cls][c] += lr * y * theta_train(idx, c);
                    w[cls][dim] += lr * y;
                }
            }
        }
    }

    int correct = 0;
    for (int r = 0; r < theta_test.rows; ++r) {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int cls = 0; cls < classes; ++cls) {
            double score = w[cls][dim];
            for (int c = 0; c < dim; ++c) score += w[cls][c] * theta_test(r, c);
            if (score > best_score) {
                best_score = score;
                best = cls;
            }
        }
        if (best == labels_test[r]) ++correct;
    }
    return static_cast<double>(correct) / theta_test.rows;
}

}  // namespace negtm
