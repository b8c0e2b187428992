#pragma once

#include <cstdint>
#include <string>

#include "negtm/corpus.hpp"

namespace negtm {

// Planted-topic corpus: each document draws most tokens from one topic's
// disjoint word set and the rest from a shared background pool. Labels carry
// the planted dominant topic; partitions follow an 85:15 train/test split.
struct SyntheticSpec {
    int num_topics = 3;
    int words_per_topic = 20;
    int background_words = 0;
    int num_docs = 300;
    int doc_len = 40;
    double noise = 0.2;          // probability a token is background/random
    double test_fraction = 0.15;
    uint64_t seed = 42;
};

Corpus make_planted_corpus(const SyntheticSpec& spec);

// Planted word for topic k, rank i (matches make_planted_corpus naming).
std::string planted_word(int topic, int i);

void save_corpus_tsv(const Corpus& corpus, const std::string& path);

}  // namespace negtm
