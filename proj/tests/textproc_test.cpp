#include "wikicat/textproc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace wikicat;

TEST(Tokenize, Examples) {
    using V = std::vector<std::string>;
    EXPECT_EQ(tokenize("Sport-utility vehicles!"), (V{"sport", "utility", "vehicles"}));
    EXPECT_EQ(tokenize(""), V{});
    EXPECT_EQ(tokenize("A1 b2"), (V{"a1", "b2"}));
    EXPECT_EQ(tokenize("a b c dd"), V{"dd"});
    EXPECT_EQ(tokenize("Ford F-Max, 2018"), (V{"ford", "max", "2018"}));
}

TEST(StripPlural, Rules) {
    EXPECT_EQ(strip_plural("suvs"), "suv");
    EXPECT_EQ(strip_plural("bodies"), "body");
    EXPECT_EQ(strip_plural("churches"), "church");
    EXPECT_EQ(strip_plural("boxes"), "box");
    EXPECT_EQ(strip_plural("glass"), "glass");
    EXPECT_EQ(strip_plural("bus"), "bus");
    EXPECT_EQ(strip_plural("pagans"), "pagan");
    EXPECT_EQ(strip_plural("paganism"), "paganism");
}

TEST(TfIdf, IdfFormula) {
    std::vector<std::string> docs{"common alpha", "common beta", "common gamma", "common rare"};
    auto m = fit_tfidf(docs, 1);
    EXPECT_EQ(m.n_docs(), 4u);
    const auto common = *m.index_of("common");
    EXPECT_DOUBLE_EQ(m.terms()[common].idf, 1.0);
    const auto rare = *m.index_of("rare");
    EXPECT_NEAR(m.terms()[rare].idf, std::log(5.0 / 2.0) + 1.0, 1e-12);
    EXPECT_NEAR(m.terms()[rare].idf, 1.9163, 1e-4);
}

TEST(TfIdf, MinDfCutoffAndLexicographicIndex) {
    std::vector<std::string> docs{"zeta apple mango", "zeta apple", "zeta kiwi apple", "mango"};
    auto m = fit_tfidf(docs);  // min_df 3
    ASSERT_EQ(m.vocab_size(), 2u);
    EXPECT_EQ(m.terms()[0].term, "apple");
    EXPECT_EQ(m.terms()[1].term, "zeta");
    EXPECT_FALSE(m.index_of("mango"));  // df 2
    EXPECT_FALSE(m.index_of("kiwi"));
}

TEST(TfIdf, EmptyCorpusRejectedAndAllFilteredIsValid) {
    std::vector<std::string> none;
    EXPECT_THROW(fit_tfidf(none), InputError);
    std::vector<std::string> one{"solitary words only"};
    auto m = fit_tfidf(one);
    EXPECT_EQ(m.vocab_size(), 0u);
    EXPECT_TRUE(m.transform("solitary words").empty());
}

TEST(TfIdf, TransformMatchesHandComputation) {
    std::vector<std::string> docs{"aa bb", "aa cc", "aa bb cc", "dd"};
    auto m = fit_tfidf(docs, 1);
    auto v = m.transform("aa aa bb zz");
    // Independent: counts x idf then L2 normalize.
    std::map<std::string, double> expect{{"aa", 2.0 * (std::log(5.0 / 4.0) + 1.0)},
                                         {"bb", 1.0 * (std::log(5.0 / 3.0) + 1.0)}};
    double norm = 0.0;
    for (auto& [_, w] : expect) norm += w * w;
    norm = std::sqrt(norm);
    ASSERT_EQ(v.entries.size(), 2u);
    for (const auto& [idx, w] : v.entries) EXPECT_NEAR(w, expect.at(m.terms()[idx].term) / norm, 1e-12);
}

TEST(TfIdf, TransformProperties) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> word(0, 60), len(0, 30);
    auto doc = [&] {
        std::string s;
        for (int i = 0, n = len(rng); i < n; ++i) s += "w" + std::to_string(word(rng)) + " ";
        return s;
    };
    std::vector<std::string> corpus;
    for (int i = 0; i < 200; ++i) corpus.push_back(doc());
    auto m = fit_tfidf(corpus);
    for (const auto& d : corpus) {
        auto v = m.transform(d);
        std::set<std::uint32_t> seen;
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            EXPECT_LT(v.entries[i].first, m.vocab_size());
            EXPECT_NE(v.entries[i].second, 0.0);
            if (i > 0) EXPECT_LT(v.entries[i - 1].first, v.entries[i].first);
        }
        if (!v.empty()) EXPECT_NEAR(v.norm(), 1.0, 1e-9);
        // Repeating the text scales every count uniformly.
        auto tripled = m.transform(d + " " + d + " " + d);
        ASSERT_EQ(tripled.entries.size(), v.entries.size());
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            EXPECT_EQ(tripled.entries[i].first, v.entries[i].first);
            EXPECT_NEAR(tripled.entries[i].second, v.entries[i].second, 1e-12);
        }
    }
}

TEST(TfIdf, SingleTermAndOovDocuments) {
    std::vector<std::string> docs{"aa bb", "aa bb", "aa bb"};
    auto m = fit_tfidf(docs);
    auto v = m.transform("bb bb bb bb");
    ASSERT_EQ(v.entries.size(), 1u);
    EXPECT_DOUBLE_EQ(v.entries[0].second, 1.0);
    EXPECT_TRUE(m.transform("nothing here").empty());
}

TEST(TfIdf, JsonRoundTrip) {
    std::vector<std::string> docs{"aa bb", "aa cc", "aa bb cc", "bb cc"};
    auto m = fit_tfidf(docs, 2);
    auto back = TfIdfModel::from_json(m.to_json());
    EXPECT_TRUE(back == m);
    EXPECT_EQ(back.transform("aa cc").entries, m.transform("aa cc").entries);
    auto j = m.to_json();
    EXPECT_EQ(j.at("terms").at(0).at(0), "aa");
    std::swap(j["terms"][0], j["terms"][1]);
    EXPECT_THROW(TfIdfModel::from_json(j), InputError);
}

TEST(SparseVector, Dot) {
    SparseVector a, b;
    a.entries = {{0, 1.0}, {3, 2.0}, {7, -1.0}};
    b.entries = {{3, 4.0}, {5, 9.0}, {7, 1.0}};
    EXPECT_DOUBLE_EQ(dot(a, b), 7.0);
    std::vector<double> dense{1, 0, 0, 1, 0, 0, 0, 2};
    EXPECT_DOUBLE_EQ(dot(a, dense), 1.0 + 2.0 - 2.0);
}
