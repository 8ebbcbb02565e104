#pragma once
// Evaluation metrics: accuracy (set-membership, a.k.a. acc+), macro-F1, and
// per-parent grouped evaluation for fine-grained label spaces.
//
// Multi-label golds are resolved before confusion counting: to the predicted
// label if it is in the gold set, else to the first gold label. Macro-F1
// averages per-class F1 over the classes that occur in the resolved golds.

#include "wikicat/error.hpp"
#include "wikicat/json.hpp"
#include "wikicat/parallel.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace wikicat {

struct EvalInstance {
    std::string text;
    std::vector<std::string> gold;  // at least one label
    std::optional<std::string> parent;
};

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // resolved gold count
};

struct EvalReport {
    std::size_t n = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;  // ascending label
    std::optional<std::string> group;

    Json to_json() const {
        Json classes = Json::array();
        for (const auto& c : per_class) {
            classes.push_back({{"label", c.label},
                               {"precision", c.precision},
                               {"recall", c.recall},
                               {"f1", c.f1},
                               {"support", c.support}});
        }
        return {{"group", group ? Json(*group) : Json()},
                {"n", n},
                {"accuracy", accuracy},
                {"macro_f1", macro_f1},
                {"per_class", std::move(classes)}};
    }
};

namespace detail {
inline void check_lengths(std::size_t preds, std::size_t golds) {
    if (preds != golds)
        throw UsageError("prediction/gold length mismatch: " + std::to_string(preds) + " vs " + std::to_string(golds));
    if (preds == 0) throw UsageError("evaluation needs at least one instance");
}
inline bool contains(const std::vector<std::string>& set, const std::string& x) {
    return std::find(set.begin(), set.end(), x) != set.end();
}
}  // namespace detail

// Fraction of instances whose prediction is in the gold set.
inline double accuracy(std::span<const std::string> preds, std::span<const std::vector<std::string>> golds) {
    detail::check_lengths(preds.size(), golds.size());
    std::size_t hit = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (detail::contains(golds[i], preds[i])) ++hit;
    return static_cast<double>(hit) / static_cast<double>(preds.size());
}

inline std::vector<ClassMetrics> per_class_metrics(std::span<const std::string> preds,
                                                   std::span<const std::vector<std::string>> golds) {
    detail::check_lengths(preds.size(), golds.size());
    struct Counts {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
    };
    std::map<std::string, Counts> counts;
    std::set<std::string> gold_classes;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (golds[i].empty()) throw UsageError("instance " + std::to_string(i) + " has no gold label");
        const std::string& gold = detail::contains(golds[i], preds[i]) ? preds[i] : golds[i].front();
        gold_classes.insert(gold);
        ++counts[gold].support;
        if (preds[i] == gold) {
            ++counts[gold].tp;
        } else {
            ++counts[gold].fn;
            ++counts[preds[i]].fp;
        }
    }
    std::vector<ClassMetrics> out;
    for (const auto& label : gold_classes) {
        const auto& c = counts[label];
        ClassMetrics m;
        m.label = label;
        m.support = c.support;
        m.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
        m.recall = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        out.push_back(std::move(m));
    }
    return out;
}

inline double macro_f1(std::span<const std::string> preds, std::span<const std::vector<std::string>> golds) {
    auto classes = per_class_metrics(preds, golds);
    double sum = 0.0;
    for (const auto& c : classes) sum += c.f1;
    return sum / static_cast<double>(classes.size());
}

inline EvalReport evaluate(std::span<const std::string> preds, std::span<const std::vector<std::string>> golds,
                           std::optional<std::string> group = std::nullopt) {
    EvalReport r;
    r.n = preds.size();
    r.accuracy = accuracy(preds, golds);
    r.per_class = per_class_metrics(preds, golds);
    double sum = 0.0;
    for (const auto& c : r.per_class) sum += c.f1;
    r.macro_f1 = sum / static_cast<double>(r.per_class.size());
    r.group = std::move(group);
    return r;
}

using TextClassifier = std::function<std::string(const std::string& text)>;

struct GroupedReport {
    EvalReport aggregate;              // all instances pooled
    std::vector<EvalReport> groups;    // ascending parent
    std::vector<std::string> predictions;  // instance order

    Json to_json() const {
        Json g = Json::array();
        for (const auto& r : groups) g.push_back(r.to_json());
        return {{"aggregate", aggregate.to_json()}, {"groups", std::move(g)}};
    }
};

// Classifies each instance with the model registered for its parent. With
// `ignore_parent`, every instance goes to the model under key "" instead.
inline GroupedReport evaluate_grouped(const std::vector<EvalInstance>& data,
                                      const std::map<std::string, TextClassifier>& models, unsigned workers = 1,
                                      bool ignore_parent = false) {
    if (data.empty()) throw UsageError("evaluation needs at least one instance");
    std::vector<const TextClassifier*> route(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::string key = ignore_parent ? std::string() : data[i].parent.value_or(std::string());
        auto it = models.find(key);
        if (it == models.end()) throw InputError("no model for parent '" + key + "' (instance " + std::to_string(i) + ")");
        route[i] = &it->second;
    }
    GroupedReport out;
    out.predictions.resize(data.size());
    parallel_for(data.size(), workers, [&](std::size_t i) { out.predictions[i] = (*route[i])(data[i].text); });

    std::vector<std::vector<std::string>> golds;
    golds.reserve(data.size());
    for (const auto& d : data) golds.push_back(d.gold);
    out.aggregate = evaluate(out.predictions, golds);

    if (!ignore_parent) {
        std::map<std::string, std::vector<std::size_t>> members;
        for (std::size_t i = 0; i < data.size(); ++i) members[data[i].parent.value_or(std::string())].push_back(i);
        if (members.size() > 1 || !members.begin()->first.empty()) {
            for (const auto& [parent, idx] : members) {
                std::vector<std::string> p;
                std::vector<std::vector<std::string>> g;
                for (auto i : idx) {
                    p.push_back(out.predictions[i]);
                    g.push_back(golds[i]);
                }
                out.groups.push_back(evaluate(p, g, parent));
            }
        }
    }
    return out;
}

// eval.jsonl rows: {"text": str, "labels": [str], "parent": str|null}.
inline std::vector<EvalInstance> read_eval_jsonl(const std::string& path) {
    std::vector<EvalInstance> out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) {
        EvalInstance e;
        e.text = j.at("text").get<std::string>();
        e.gold = j.at("labels").get<std::vector<std::string>>();
        if (e.gold.empty()) throw InputError("instance has no gold labels");
        if (j.contains("parent") && !j.at("parent").is_null()) e.parent = j.at("parent").get<std::string>();
        out.push_back(std::move(e));
    });
    return out;
}

}  // namespace wikicat
