#include "negtm/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace negtm {

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

}  // namespace

bool Corpus::has_labels() const {
    for (int l : labels)
        if (l >= 0) return true;
    return false;
}

Corpus parse_corpus(std::istream& in, const std::string& name) {
    Corpus corpus;
    corpus.name = name;
    std::unordered_map<std::string, int> label_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() < 2 || fields.size() > 3)
            throw std::runtime_error("malformed corpus line " + std::to_string(line_no) +
                                     ": expected text<TAB>partition[<TAB>label]");
        std::vector<std::string> tokens;
        std::istringstream ts(fields[0]);
        std::string tok;
        while (ts >> tok) tokens.push_back(lowercase(tok));
        Partition part;
        if (fields[1] == "train")
            part = Partition::train;
        else if (fields[1] == "test")
            part = Partition::test;
        else
            throw std::runtime_error("unknown partition tag '" + fields[1] + "' on line " +
                                     std::to_string(line_no));
        int label = -1;
        if (fields.size() == 3 && !fields[2].empty()) {
            auto [it, inserted] = label_ids.try_emplace(fields[2], static_cast<int>(label_ids.size()));
            if (inserted) corpus.label_names.push_back(fields[2]);
            label = it->second;
        }
        corpus.documents.push_back(std::move(tokens));
        corpus.partitions.push_back(part);
        corpus.labels.push_back(label);
    }
    if (corpus.documents.empty()) throw std::runtime_error("empty corpus");
    return corpus;
}

Corpus load_corpus(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return parse_corpus(in, name.empty() ? path : name);
}

Vocabulary build_vocabulary(const Corpus& corpus, int max_size) {
    if (max_size < 1) throw std::invalid_argument("build_vocabulary: max_size must be >= 1");
    std::unordered_map<std::string, long> freq;
    for (const auto& doc : corpus.documents)
        for (const auto& w : doc) ++freq[w];
    std::vector<std::pair<std::string, long>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<int>(ranked.size()) > max_size) ranked.resize(max_size);
    Vocabulary vocab;
    vocab.words.reserve(ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) {
        vocab.words.push_back(ranked[i].first);
        vocab.index.emplace(ranked[i].first, static_cast<int>(i));
    }
    return vocab;
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        vocab.index.emplace(line, static_cast<int>(vocab.words.size()));
        vocab.words.push_back(line);
    }
    return vocab;
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vocabulary file: " + path);
    for (const auto& w : vocab.words) out << w << '\n';
}

DocMatrix vectorize(const Corpus& corpus, const Vocabulary& vocab, VectorKind kind) {
    int v = vocab.size();
    std::vector<std::vector<double>> rows;
    DocMatrix out;
    for (size_t d = 0; d < corpus.num_docs(); ++d) {
        std::vector<double> counts(v, 0.0);
        bool any = false;
        for (const auto& w : corpus.documents[d]) {
            int idx = vocab.lookup(w);
            if (idx >= 0) {
                counts[idx] += 1.0;
                any = true;
            }
        }
        if (!any) {
            ++out.dropped;
            continue;
        }
        rows.push_back(std::move(counts));
        out.doc_ids.push_back(static_cast<int>(d));
    }
    int n = static_cast<int>(rows.size());
    out.values = Tensor2(n, v);

    std::vector<double> idf;
    if (kind == VectorKind::tfidf) {
        idf.assign(v, 0.0);
        std::vector<long> df(v, 0);
        for (const auto& row : rows)
            for (int c = 0; c < v; ++c)
                if (row[c] > 0.0) ++df[c];
        for (int c = 0; c < v; ++c)
            if (df[c] > 0) idf[c] = std::log(static_cast<double>(n) / df[c]);
    }

    for (int r = 0; r < n; ++r) {
        const auto& row = rows[r];
        switch (kind) {
            case VectorKind::bow_count:
                for (int c = 0; c < v; ++c) out.values(r, c) = row[c];
                break;
            case VectorKind::bow_normalized: {
                double total = 0.0;
                for (int c = 0; c < v; ++c) total += row[c];
                for (int c = 0; c < v; ++c) out.values(r, c) = row[c] / total;
                break;
            }
            case VectorKind::tfidf: {
                double total = 0.0;
                for (int c = 0; c < v; ++c) {
                    double w = row[c] * idf[c];
                    out.values(r, c) = w;
                    total += w;
                }
                if (total > 0.0)
                    for (int c = 0; c < v; ++c) out.values(r, c) /= total;
                break;
            }
        }
    }
    return out;
}

std::unordered_map<int, std::vector<double>> load_embeddings(const std::string& path,
                                                             size_t num_docs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
    std::unordered_map<int, std::vector<double>> table;
    std::string line;
    int line_no = 0;
    long dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed embeddings line " + std::to_string(line_no));
        int id = std::stoi(line.substr(0, tab));
        if (id < 0 || static_cast<size_t>(id) >= num_docs)
            throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                                     ": doc id " + std::to_string(id) + " out of range");
        std::istringstream vs(line.substr(tab + 1));
        std::vector<double> vec;
        double f;
        while (vs >> f) vec.push_back(f);
        if (dim < 0) dim = static_cast<long>(vec.size());
        if (static_cast<long>(vec.size()) != dim || vec.empty())
            throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                                     ": dimension mismatch");
        table[id] = std::move(vec);
    }
    return table;
}

void save_embeddings(const std::unordered_map<int, std::vector<double>>& table,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embeddings file: " + path);
    out.precision(17);
    std::map<int, const std::vector<double>*> ordered;
    for (const auto& [id, vec] : table) ordered.emplace(id, &vec);
    for (const auto& [id, vec] : ordered) {
        out << id << '\t';
        for (size_t i = 0; i < vec->size(); ++i) {
            if (i) out << ' ';
            out << (*vec)[i];
        }
        out << '\n';
    }
}

}  // namespace negtm
