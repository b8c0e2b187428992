#include "negtm/synth.hpp"

#include <fstream>
#include <random>

namespace negtm {

std::string planted_word(int topic, int i) {
    return "t" + std::to_string(topic) + "w" + std::to_string(i);
}

Corpus make_planted_corpus(const SyntheticSpec& spec) {
    if (spec.num_topics < 1 || spec.words_per_topic < 1 || spec.num_docs < 1 || spec.doc_len < 1)
        throw std::invalid_argument("make_planted_corpus: invalid spec");
    std::mt19937_64 gen(spec.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Zipf-ish weights inside each topic so word ranks are stable.
    std::vector<double> weights(spec.words_per_topic);
    double wsum = 0.0;
    for (int i = 0; i < spec.words_per_topic; ++i) {
        weights[i] = 1.0 / (1.0 + 0.3 * i);
        wsum += weights[i];
    }
    std::discrete_distribution<int> word_rank(weights.begin(), weights.end());

    Corpus corpus;
    corpus.name = "planted";
    for (int k = 0; k < spec.num_topics; ++k) corpus.label_names.push_back("topic" + std::to_string(k));

    for (int d = 0; d < spec.num_docs; ++d) {
        int topic = d % spec.num_topics;
        std::vector<std::string> doc;
        doc.reserve(spec.doc_len);
        for (int t = 0; t < spec.doc_len; ++t) {
            if (unif(gen) < spec.noise) {
                if (spec.background_words > 0) {
                    int b = static_cast<int>(unif(gen) * spec.background_words);
                    if (b >= spec.background_words) b = spec.background_words - 1;
                    doc.push_back("bg" + std::to_string(b));
                } else {
                    int k = static_cast<int>(unif(gen) * spec.num_topics);
                    if (k >= spec.num_topics) k = spec.num_topics - 1;
                    doc.push_back(planted_word(k, word_rank(gen)));
                }
            } else {
                doc.push_back(planted_word(topic, word_rank(gen)));
            }
        }
        corpus.documents.push_back(std::move(doc));
        corpus.partitions.push_back(unif(gen) < spec.test_fraction ? Partition::test
                                                                   : Partition::train);
        corpus.labels.push_back(topic);
    }
    return corpus;
}

void save_corpus_tsv(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (size_t d = 0; d < corpus.num_docs(); ++d) {
        for (size_t i = 0; i < corpus.documents[d].size(); ++i) {
            if (i) out << ' ';
            out << corpus.documents[d][i];
        }
        out << '\t' << (corpus.partitions[d] == Partition::train ? "train" : "test");
        if (corpus.labels[d] >= 0) out << '\t' << corpus.label_names[corpus.labels[d]];
        out << '\n';
    }
}

}  // namespace negtm
