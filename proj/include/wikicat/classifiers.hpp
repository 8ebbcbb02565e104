#pragma once
// Class balancing, nearest-centroid and one-vs-rest linear SVM classifiers,
// and the keyword-voting baseline.

#include "wikicat/error.hpp"
#include "wikicat/json.hpp"
#include "wikicat/parallel.hpp"
#include "wikicat/textproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wikicat {

// Stable 64-bit FNV-1a, used to derive per-label and per-document seeds.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// splitmix64 finalizer over (seed, key).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL + fnv1a(key);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// One training instance: an index into the caller's document store plus a label.
struct LabeledDoc {
    std::size_t doc = 0;
    std::string label;
    bool operator==(const LabeledDoc&) const = default;
};

struct BalancedCorpus {
    std::vector<LabeledDoc> instances;  // grouped by ascending label
    std::vector<std::string> dropped;   // requested classes without documents
};

// Resamples every class to exactly n instances: classes above n are sampled
// without replacement, classes below n keep every instance and are topped up
// by sampling with replacement. Each class draws from its own generator
// seeded from (seed, label). Classes listed in `classes` that have no
// instances are dropped with a warning.
inline BalancedCorpus sample_balance(const std::vector<LabeledDoc>& docs, std::size_t n, std::uint64_t seed,
                                     const std::vector<std::string>& classes = {}) {
    if (n == 0) throw UsageError("sample_balance: n_per_class must be at least 1");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (const auto& c : classes) by_class[c];
    for (const auto& d : docs) by_class[d.label].push_back(d.doc);

    BalancedCorpus out;
    for (const auto& [label, members] : by_class) {
        if (members.empty()) {
            std::cerr << "warning: class '" << label << "' has no documents; dropped\n";
            out.dropped.push_back(label);
            continue;
        }
        std::mt19937_64 rng(derive_seed(seed, label));
        if (members.size() >= n) {
            std::vector<std::size_t> pool = members;
            for (std::size_t i = 0; i < n; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
                std::swap(pool[i], pool[pick(rng)]);
                out.instances.push_back({pool[i], label});
            }
        } else {
            for (auto d : members) out.instances.push_back({d, label});
            std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
            for (std::size_t i = members.size(); i < n; ++i) out.instances.push_back({members[pick(rng)], label});
        }
    }
    return out;
}

// Per-class L2-normalized mean tf-idf vectors.
struct CentroidModel {
    std::vector<std::string> labels;  // ascending
    std::vector<SparseVector> centroids;

    // Highest cosine wins; ties go to the smallest label.
    std::string predict(const SparseVector& v) const {
        if (labels.empty()) throw UsageError("predict on an empty centroid model");
        std::size_t best = 0;
        double best_score = dot(v, centroids[0]);
        for (std::size_t i = 1; i < labels.size(); ++i) {
            double s = dot(v, centroids[i]);
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        return labels[best];
    }

    Json to_json() const {
        Json classes = Json::array();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            Json entries = Json::array();
            for (const auto& [idx, w] : centroids[i].entries) entries.push_back({idx, w});
            classes.push_back({{"label", labels[i]}, {"centroid", std::move(entries)}});
        }
        return {{"classes", std::move(classes)}};
    }

    static CentroidModel from_json(const Json& j) {
        CentroidModel m;
        for (const auto& c : j.at("classes")) {
            m.labels.push_back(c.at("label").get<std::string>());
            SparseVector v;
            for (const auto& e : c.at("centroid")) v.entries.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<double>());
            m.centroids.push_back(std::move(v));
        }
        return m;
    }
    bool operator==(const CentroidModel&) const = default;
};

inline CentroidModel train_centroid(std::span<const SparseVector> vectors, std::span<const std::string> labels) {
    if (vectors.size() != labels.size()) throw UsageError("train_centroid: vectors and labels differ in length");
    if (vectors.empty()) throw UsageError("train_centroid: no training documents");
    std::map<std::string, std::map<std::uint32_t, double>> sums;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        auto& sum = sums[labels[i]];
        for (const auto& [idx, w] : vectors[i].entries) sum[idx] += w;
    }
    CentroidModel m;
    for (auto& [label, sum] : sums) {
        m.labels.push_back(label);
        SparseVector c;
        for (const auto& [idx, w] : sum)
            if (w != 0.0) c.entries.emplace_back(idx, w);
        c.normalize();  // normalizing the sum equals normalizing the mean
        m.centroids.push_back(std::move(c));
    }
    return m;
}

struct TrainConfig {
    double lambda = 1e-4;
    unsigned epochs = 5;
    double eta0 = 0.1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(lambda > 0.0)) throw ConfigError("train config: lambda must be positive");
        if (epochs < 1) throw ConfigError("train config: epochs must be at least 1");
        if (!(eta0 > 0.0)) throw ConfigError("train config: eta0 must be positive");
    }
    Json to_json() const { return {{"lambda", lambda}, {"epochs", epochs}, {"eta0", eta0}, {"seed", seed}}; }
    static TrainConfig from_json(const Json& j) {
        TrainConfig c;
        c.lambda = j.value("lambda", c.lambda);
        c.epochs = j.value("epochs", c.epochs);
        c.eta0 = j.value("eta0", c.eta0);
        c.seed = j.value("seed", c.seed);
        c.validate();
        return c;
    }
    bool operator==(const TrainConfig&) const = default;
};

struct LinearSvmModel {
    std::vector<std::string> labels;  // ascending
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
    TrainConfig config;
    std::vector<std::vector<double>> epoch_loss;  // per class, per epoch

    std::vector<double> scores(const SparseVector& v) const {
        std::vector<double> s(labels.size());
        for (std::size_t k = 0; k < labels.size(); ++k) s[k] = dot(v, weights[k]) + bias[k];
        return s;
    }

    // argmax of w.x + b; ties go to the smallest label.
    std::string predict(const SparseVector& v) const {
        if (labels.empty()) throw UsageError("predict on an empty SVM model");
        auto s = scores(v);
        std::size_t best = 0;
        for (std::size_t k = 1; k < s.size(); ++k)
            if (s[k] > s[best]) best = k;
        return labels[best];
    }

    Json to_json() const {
        Json classes = Json::array();
        for (std::size_t k = 0; k < labels.size(); ++k) {
            Json w = Json::array();
            for (std::size_t i = 0; i < dim; ++i)
                if (weights[k][i] != 0.0) w.push_back({i, weights[k][i]});
            classes.push_back({{"label", labels[k]}, {"bias", bias[k]}, {"weights", std::move(w)}});
        }
        return {{"dim", dim}, {"config", config.to_json()}, {"classes", std::move(classes)}};
    }

    static LinearSvmModel from_json(const Json& j) {
        LinearSvmModel m;
        m.dim = j.at("dim").get<std::size_t>();
        m.config = TrainConfig::from_json(j.at("config"));
        for (const auto& c : j.at("classes")) {
            m.labels.push_back(c.at("label").get<std::string>());
            m.bias.push_back(c.at("bias").get<double>());
            std::vector<double> w(m.dim, 0.0);
            for (const auto& e : c.at("weights")) {
                auto idx = e.at(0).get<std::size_t>();
                if (idx >= m.dim) throw InputError("SVM weight index out of range");
                w[idx] = e.at(1).get<double>();
            }
            m.weights.push_back(std::move(w));
        }
        return m;
    }
};

namespace detail {

struct BinarySvm {
    std::vector<double> w;
    double b = 0.0;
    std::vector<double> epoch_loss;
};

inline double objective(std::span<const SparseVector> xs, std::span<const signed char> ys,
                        const std::vector<double>& w, double b, double lambda) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) hinge += std::max(0.0, 1.0 - ys[i] * (dot(xs[i], w) + b));
    double sq = 0.0;
    for (double v : w) sq += v * v;
    return hinge / static_cast<double>(xs.size()) + 0.5 * lambda * sq;
}

// SGD on hinge loss + lambda/2 |w|^2 with eta_t = eta0 / (1 + eta0 lambda t).
// w is kept as scale * v so the per-step shrink is O(1); the shrink factor is
// clamped at 0 for steps where eta_t * lambda exceeds 1.
inline BinarySvm train_binary(std::span<const SparseVector> xs, std::span<const signed char> ys, std::size_t dim,
                              const TrainConfig& cfg, std::uint64_t seed) {
    BinarySvm out;
    std::vector<double> v(dim, 0.0);
    double scale = 1.0;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t t = 0;
    auto materialize = [&] {
        for (auto& x : v) x *= scale;
        scale = 1.0;
    };
    for (unsigned epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            const double eta = cfg.eta0 / (1.0 + cfg.eta0 * cfg.lambda * static_cast<double>(t));
            const double y = ys[i];
            const double margin = y * (scale * dot(xs[i], v) + out.b);
            const double shrink = std::max(0.0, 1.0 - eta * cfg.lambda);
            if (shrink == 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if (margin < 1.0) {
                const double step = eta * y / scale;
                for (const auto& [idx, val] : xs[i].entries) v[idx] += step * val;
                out.b += eta * y;
            }
            if (scale < 1e-9) materialize();
            ++t;
        }
        materialize();
        out.epoch_loss.push_back(objective(xs, ys, v, out.b, cfg.lambda));
    }
    out.w = std::move(v);
    return out;
}

}  // namespace detail

// One-vs-rest: class k is trained on +1 for its documents and -1 for the
// rest, shuffled each epoch by a generator seeded from (seed, label), so the
// per-class models do not depend on training order or worker count.
inline LinearSvmModel train_svm(std::span<const SparseVector> vectors, std::span<const std::string> labels,
                                std::size_t dim, const TrainConfig& cfg, unsigned workers = 1) {
    cfg.validate();
    if (vectors.size() != labels.size()) throw UsageError("train_svm: vectors and labels differ in length");
    std::set<std::string> classes(labels.begin(), labels.end());
    if (classes.size() < 2) throw UsageError("train_svm needs at least two classes");
    for (const auto& v : vectors)
        if (!v.empty() && v.entries.back().first >= dim) throw UsageError("train_svm: feature index out of range");

    LinearSvmModel m;
    m.labels.assign(classes.begin(), classes.end());
    m.dim = dim;
    m.config = cfg;
    m.weights.resize(m.labels.size());
    m.bias.resize(m.labels.size());
    m.epoch_loss.resize(m.labels.size());
    parallel_for(m.labels.size(), workers, [&](std::size_t k) {
        std::vector<signed char> ys(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) ys[i] = labels[i] == m.labels[k] ? 1 : -1;
        auto model = detail::train_binary(vectors, ys, dim, cfg, derive_seed(cfg.seed, m.labels[k]));
        m.weights[k] = std::move(model.w);
        m.bias[k] = model.b;
        m.epoch_loss[k] = std::move(model.epoch_loss);
    });
    return m;
}

// Predicts the label whose name tokens occur most often in the text. Name
// and document tokens are both plural-stripped; a multi-token name scores the
// sum of its distinct tokens' counts. No hit at all, or a tie, is broken by a
// generator seeded from (seed, text).
class KeywordVoter {
public:
    // (label id, display name) pairs.
    explicit KeywordVoter(std::vector<std::pair<std::string, std::string>> labels) {
        if (labels.empty()) throw UsageError("keyword voting needs at least one label");
        std::sort(labels.begin(), labels.end());
        for (auto& [id, name] : labels) {
            std::set<std::string> toks;
            for (auto& t : tokenize(name)) toks.insert(strip_plural(std::move(t)));
            labels_.push_back(id);
            name_tokens_.emplace_back(toks.begin(), toks.end());
        }
    }

    std::vector<std::size_t> scores(std::string_view text) const {
        std::map<std::string, std::size_t> counts;
        for (auto& t : tokenize(text)) ++counts[strip_plural(std::move(t))];
        std::vector<std::size_t> out(labels_.size(), 0);
        for (std::size_t k = 0; k < labels_.size(); ++k)
            for (const auto& t : name_tokens_[k])
                if (auto it = counts.find(t); it != counts.end()) out[k] += it->second;
        return out;
    }

    std::string predict(std::string_view text, std::uint64_t seed) const {
        auto s = scores(text);
        const auto best = *std::max_element(s.begin(), s.end());
        std::vector<std::size_t> tied;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s[k] == best) tied.push_back(k);
        if (tied.size() == 1) return labels_[tied.front()];
        std::mt19937_64 rng(derive_seed(seed, text));
        std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
        return labels_[tied[pick(rng)]];
    }

    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<std::string>> name_tokens_;
};

inline std::string keyword_vote(std::string_view text, const std::vector<std::pair<std::string, std::string>>& labels,
                                std::uint64_t seed) {
    return KeywordVoter(labels).predict(text, seed);
}

}  // namespace wikicat
