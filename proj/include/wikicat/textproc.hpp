#pragma once
// Tokenization and tf-idf vectorization.

#include "wikicat/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wikicat/json.hpp"

namespace wikicat {

namespace detail {
// Bytes >= 0x80 are treated as word characters so UTF-8 letters stay inside tokens.
inline bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}
inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
}  // namespace detail

// Lowercases, splits on every non-alphanumeric byte, drops tokens shorter
// than two bytes. Token order follows the text.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(std::move(current));
        current.clear();
    };
    for (char c : text) {
        if (detail::is_word_byte(static_cast<unsigned char>(c)))
            current.push_back(detail::ascii_lower(c));
        else
            flush();
    }
    flush();
    return tokens;
}

// Rule-based plural stripping on a lowercase token:
//   -ies -> -y; -es after s/x/z/ch/sh -> drop "es"; other trailing -s -> drop.
// Tokens of three bytes or fewer and tokens ending in "ss" are left alone.
inline std::string strip_plural(std::string token) {
    const auto n = token.size();
    if (n <= 3 || token.back() != 's') return token;
    if (token.ends_with("ss")) return token;
    if (token.ends_with("ies") && n > 4) {
        token.resize(n - 3);
        token.push_back('y');
        return token;
    }
    if (token.ends_with("es")) {
        std::string_view stem(token.data(), n - 2);
        if (stem.ends_with("s") || stem.ends_with("x") || stem.ends_with("z") ||
            stem.ends_with("ch") || stem.ends_with("sh")) {
            token.resize(n - 2);
            return token;
        }
    }
    token.pop_back();
    return token;
}

// Sparse vector with strictly increasing feature indices and no zero entries.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
    bool operator==(const SparseVector&) const = default;

    double norm() const {
        double sum = 0.0;
        for (const auto& [_, v] : entries) sum += v * v;
        return std::sqrt(sum);
    }
    void normalize() {
        double n = norm();
        if (n > 0.0)
            for (auto& [_, v] : entries) v /= n;
    }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    auto i = a.entries.begin();
    auto j = b.entries.begin();
    while (i != a.entries.end() && j != b.entries.end()) {
        if (i->first < j->first)
            ++i;
        else if (j->first < i->first)
            ++j;
        else {
            sum += i->second * j->second;
            ++i;
            ++j;
        }
    }
    return sum;
}

inline double dot(const SparseVector& a, std::span<const double> dense) {
    double sum = 0.0;
    for (const auto& [idx, v] : a.entries) sum += v * dense[idx];
    return sum;
}

class TfIdfModel {
public:
    struct Term {
        std::string term;
        std::size_t df = 0;
        double idf = 0.0;
        bool operator==(const Term&) const = default;
    };

    TfIdfModel() = default;

    std::size_t n_docs() const { return n_docs_; }
    std::size_t min_df() const { return min_df_; }
    std::size_t vocab_size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    std::optional<std::uint32_t> index_of(std::string_view term) const {
        auto it = index_.find(std::string(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Raw counts times idf, L2-normalized. Out-of-vocabulary terms are ignored.
    SparseVector transform(std::string_view text) const {
        std::map<std::uint32_t, double> counts;
        for (const auto& tok : tokenize(text)) {
            if (auto idx = index_of(tok)) counts[*idx] += 1.0;
        }
        SparseVector v;
        v.entries.reserve(counts.size());
        for (const auto& [idx, count] : counts) v.entries.emplace_back(idx, count * terms_[idx].idf);
        v.normalize();
        return v;
    }

    Json to_json() const {
        Json terms = Json::array();
        for (const auto& t : terms_) terms.push_back({t.term, t.df, t.idf});
        return {{"n_docs", n_docs_}, {"min_df", min_df_}, {"terms", std::move(terms)}};
    }

    static TfIdfModel from_json(const Json& j) {
        TfIdfModel m;
        try {
            m.n_docs_ = j.at("n_docs").get<std::size_t>();
            m.min_df_ = j.at("min_df").get<std::size_t>();
            for (const auto& row : j.at("terms")) {
                m.terms_.push_back({row.at(0).get<std::string>(), row.at(1).get<std::size_t>(),
                                    row.at(2).get<double>()});
            }
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed tf-idf model: ") + e.what());
        }
        for (std::size_t i = 1; i < m.terms_.size(); ++i) {
            if (!(m.terms_[i - 1].term < m.terms_[i].term))
                throw InputError("tf-idf model terms are not sorted and unique");
        }
        m.build_index();
        return m;
    }

    bool operator==(const TfIdfModel& o) const {
        return n_docs_ == o.n_docs_ && min_df_ == o.min_df_ && terms_ == o.terms_;
    }

    // Smoothed idf: ln((1 + N) / (1 + df)) + 1.
    static double idf(std::size_t n_docs, std::size_t df) {
        return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
    }

private:
    friend class TfIdfFitter;

    void build_index() {
        index_.clear();
        index_.reserve(terms_.size());
        for (std::uint32_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i].term, i);
    }

    std::size_t n_docs_ = 0;
    std::size_t min_df_ = 0;
    std::vector<Term> terms_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// Streaming document-frequency pass; finish() applies the cutoff.
class TfIdfFitter {
public:
    explicit TfIdfFitter(std::size_t min_df = 3) : min_df_(min_df) {}

    void add(std::string_view text) {
        auto tokens = tokenize(text);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) ++df_[std::move(t)];
        ++n_docs_;
    }

    TfIdfModel finish() const {
        if (n_docs_ == 0) throw InputError("cannot fit tf-idf on an empty corpus");
        TfIdfModel m;
        m.n_docs_ = n_docs_;
        m.min_df_ = min_df_;
        for (const auto& [term, df] : df_) {
            if (df >= min_df_) m.terms_.push_back({term, df, TfIdfModel::idf(n_docs_, df)});
        }
        m.build_index();
        return m;
    }

private:
    std::size_t min_df_;
    std::size_t n_docs_ = 0;
    std::map<std::string, std::size_t> df_;
};

// Vocabulary = terms with document frequency >= min_df, indexed in
// lexicographic order. An empty vocabulary is a valid (if useless) model.
template <typename Range>
TfIdfModel fit_tfidf(const Range& documents, std::size_t min_df = 3) {
    TfIdfFitter fitter(min_df);
    for (const auto& doc : documents) fitter.add(doc);
    return fitter.finish();
}

}  // namespace wikicat
