#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "negtm/tensor.hpp"

namespace negtm {

enum class Partition { train, test };

struct Corpus {
    std::string name;
    std::vector<std::vector<std::string>> documents;   // tokenized, lowercased
    std::vector<Partition> partitions;                 // one per document
    std::vector<int> labels;                           // -1 when unlabeled
    std::vector<std::string> label_names;              // id -> original label string

    size_t num_docs() const { return documents.size(); }
    bool has_labels() const;
};

struct Vocabulary {
    std::vector<std::string> words;                    // index -> word
    std::unordered_map<std::string, int> index;        // word -> index

    int size() const { return static_cast<int>(words.size()); }
    int lookup(const std::string& w) const {
        auto it = index.find(w);
        return it == index.end() ? -1 : it->second;
    }
};

enum class VectorKind { bow_count, bow_normalized, tfidf };

// One dense document-vector matrix plus the bookkeeping from dropping
// documents that lost all tokens to vocabulary filtering.
struct DocMatrix {
    Tensor2 values;                 // kept docs x V
    std::vector<int> doc_ids;       // row -> original corpus index
    int dropped = 0;
};

// Lines are `text<TAB>partition[<TAB>label]`, partition in {train, test}.
// Tokenization is whitespace split + lowercasing.
Corpus load_corpus(const std::string& path, const std::string& name = "");
Corpus parse_corpus(std::istream& in, const std::string& name);

// Words ranked by corpus frequency, ties broken lexicographically,
// truncated to max_size.
Vocabulary build_vocabulary(const Corpus& corpus, int max_size);

Vocabulary load_vocabulary(const std::string& path);
void save_vocabulary(const Vocabulary& vocab, const std::string& path);

// bow_count: raw term counts. bow_normalized: counts / doc total.
// tfidf: count * ln(N/df), L1-normalized; N and df are over retained docs.
DocMatrix vectorize(const Corpus& corpus, const Vocabulary& vocab, VectorKind kind);

// Lines are `doc_id<TAB>f1 f2 ... fD`; all rows must share D and ids must be
// valid corpus indices.
std::unordered_map<int, std::vector<double>> load_embeddings(const std::string& path,
                                                             size_t num_docs);
void save_embeddings(const std::unordered_map<int, std::vector<double>>& table,
                     const std::string& path);

}  // namespace negtm
