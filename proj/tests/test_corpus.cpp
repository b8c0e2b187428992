#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "negtm/corpus.hpp"

using namespace negtm;

TEST_CASE("parse_corpus: basic line") {
    std::istringstream in("Say hello World\ttrain\tgreet\n");
    Corpus c = parse_corpus(in, "toy");
    REQUIRE(c.num_docs() == 1);
    CHECK(c.documents[0] == std::vector<std::string>{"say", "hello", "world"});
    CHECK(c.partitions[0] == Partition::train);
    CHECK(c.labels[0] == 0);
    CHECK(c.label_names[0] == "greet");
}

TEST_CASE("parse_corpus: empty input rejected") {
    std::istringstream in("");
    CHECK_THROWS_WITH_AS(parse_corpus(in, "x"), doctest::Contains("empty corpus"),
                         std::runtime_error);
}

TEST_CASE("parse_corpus: unknown partition names the line") {
    std::istringstream in("a b\ttrain\na c\tvalidation\n");
    CHECK_THROWS_WITH_AS(parse_corpus(in, "x"), doctest::Contains("2"), std::runtime_error);
}

TEST_CASE("parse_corpus: malformed line names the line") {
    std::istringstream in("no tab here\n");
    CHECK_THROWS_AS(parse_corpus(in, "x"), std::runtime_error);
}

TEST_CASE("parse_corpus: labels optional") {
    std::istringstream in("a b\ttrain\nc d\ttest\n");
    Corpus c = parse_corpus(in, "x");
    CHECK_FALSE(c.has_labels());
    CHECK(c.labels == std::vector<int>{-1, -1});
    CHECK(c.partitions[1] == Partition::test);
}

TEST_CASE("build_vocabulary: frequency order then truncation") {
    std::istringstream in("a a a b b c\ttrain\n");
    Corpus c = parse_corpus(in, "x");
    Vocabulary v = build_vocabulary(c, 2);
    CHECK(v.words == std::vector<std::string>{"a", "b"});
    CHECK(v.lookup("a") == 0);
    CHECK(v.lookup("c") == -1);
}

TEST_CASE("build_vocabulary: lexicographic tie-break") {
    std::istringstream in("b b a a\ttrain\n");
    Corpus c = parse_corpus(in, "x");
    Vocabulary v = build_vocabulary(c, 1);
    CHECK(v.words == std::vector<std::string>{"a"});
}

TEST_CASE("build_vocabulary: deterministic") {
    std::istringstream in1("z q z r q m\ttrain\nm m q\ttest\n");
    Corpus c1 = parse_corpus(in1, "x");
    Vocabulary a = build_vocabulary(c1, 4);
    Vocabulary b = build_vocabulary(c1, 4);
    CHECK(a.words == b.words);
}

TEST_CASE("vectorize: bow shapes and normalization") {
    std::istringstream in("a a b\ttrain\n");
    Corpus c = parse_corpus(in, "x");
    Vocabulary v;
    for (const char* w : {"a", "b", "c"}) {
        v.index[w] = v.size();
        v.words.push_back(w);
    }
    DocMatrix m = vectorize(c, v, VectorKind::bow_normalized);
    REQUIRE(m.values.rows == 1);
    CHECK(m.values(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(m.values(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(m.values(0, 2) == 0.0);
}

TEST_CASE("vectorize: doc emptied by vocab filtering is dropped and counted") {
    std::istringstream in("a b\ttrain\nzz zz\ttrain\n");
    Corpus c = parse_corpus(in, "x");
    Vocabulary v = build_vocabulary(c, 2);   // keeps a, b by lexicographic order? freq: zz:2 a:1 b:1
    // force a vocab without zz
    Vocabulary v2;
    for (const char* w : {"a", "b"}) {
        v2.index[w] = v2.size();
        v2.words.push_back(w);
    }
    DocMatrix m = vectorize(c, v2, VectorKind::bow_count);
    CHECK(m.values.rows == 1);
    CHECK(m.dropped == 1);
    CHECK(m.doc_ids == std::vector<int>{0});
}

TEST_CASE("vectorize: tfidf of everywhere-word is zero; hand case") {
    std::istringstream in("a b\ttrain\na\ttrain\n");
    Corpus c = parse_corpus(in, "x");
    Vocabulary v;
    for (const char* w : {"a", "b"}) {
        v.index[w] = v.size();
        v.words.push_back(w);
    }
    DocMatrix m = vectorize(c, v, VectorKind::tfidf);
    // doc0: a has idf ln(2/2)=0, b has idf ln(2/1) -> normalized [0, 1]
    CHECK(m.values(0, 0) == doctest::Approx(0.0));
    CHECK(m.values(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("vectorize: normalized rows sum to 1") {
    std::istringstream in("x y z x\ttrain\ny y\ttest\nz\ttrain\n");
    Corpus c = parse_corpus(in, "x");
    Vocabulary v = build_vocabulary(c, 3);
    DocMatrix m = vectorize(c, v, VectorKind::bow_normalized);
    for (int r = 0; r < m.values.rows; ++r) {
        double s = 0;
        for (int col = 0; col < m.values.cols; ++col) s += m.values(r, col);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("embeddings: round-trip and validation") {
    std::filesystem::path path = std::filesystem::temp_directory_path() / "negtm_emb_test.tsv";
    std::unordered_map<int, std::vector<double>> table{
        {0, {1.5, -2.25, 0.0078125, 3.1}},
        {1, {0.1, 0.2, 0.3, 0.4}},
    };
    save_embeddings(table, path.string());
    auto loaded = load_embeddings(path.string(), 2);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == table[0]);   // bit-exact round trip
    CHECK(loaded[1] == table[1]);

    CHECK_THROWS_AS(load_embeddings(path.string(), 1), std::runtime_error);   // id out of range

    {
        std::ofstream out(path);
        out << "0\t1 2 3\n1\t1 2\n";
    }
    CHECK_THROWS_AS(load_embeddings(path.string(), 2), std::runtime_error);   // ragged
    std::filesystem::remove(path);
}

TEST_CASE("vocabulary file round-trip") {
    std::filesystem::path path = std::filesystem::temp_directory_path() / "negtm_vocab_test.txt";
    Vocabulary v;
    for (const char* w : {"beta", "alpha", "gamma"}) {
        v.index[w] = v.size();
        v.words.push_back(w);
    }
    save_vocabulary(v, path.string());
    Vocabulary loaded = load_vocabulary(path.string());
    CHECK(loaded.words == v.words);
    CHECK(loaded.lookup("alpha") == 1);
    std::filesystem::remove(path);
}
