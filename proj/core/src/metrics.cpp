#include "cdec/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cdec/errors.hpp"

namespace cdec {

void ScoreTable::validate() const {
    if (!scores.same_shape(truths)) {
        throw DimensionError("score table: scores " + scores.shape_str() +
                             " vs truths " + truths.shape_str());
    }
    if (scores.empty()) {
        throw ArgumentError("score table: empty");
    }
    for (double v : truths.values()) {
        if (v != 0.0 && v != 1.0) {
            throw ArgumentError("score table: truths must be 0/1");
        }
    }
}

std::optional<double> average_precision(const std::vector<double>& scores,
                                        const std::vector<std::uint8_t>& truths) {
    if (scores.empty() || scores.size() != truths.size()) {
        throw ArgumentError("average_precision: need matching nonempty inputs");
    }
    std::vector<std::uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::size_t hits = 0;
    double total = 0.0;
    for (std::size_t rank = 1; rank <= order.size(); ++rank) {
        if (truths[order[rank - 1]]) {
            ++hits;
            total += static_cast<double>(hits) / static_cast<double>(rank);
        }
    }
    if (hits == 0) return std::nullopt;
    return total / static_cast<double>(hits);
}

namespace {

std::optional<double> column_ap(const ScoreTable& table, std::uint32_t c) {
    std::vector<double> s(table.records());
    std::vector<std::uint8_t> t(table.records());
    for (std::size_t r = 0; r < table.records(); ++r) {
        s[r] = table.scores.at(r, c);
        t[r] = table.truths.at(r, c) != 0.0 ? 1 : 0;
    }
    return average_precision(s, t);
}

void check_subset(const ScoreTable& table,
                  const std::vector<std::uint32_t>& class_subset) {
    if (class_subset.empty()) {
        throw ArgumentError("metrics: empty class subset");
    }
    for (std::uint32_t c : class_subset) {
        if (c >= table.classes()) {
            throw ArgumentError("metrics: class index " + std::to_string(c) +
                                " out of range");
        }
    }
}

}  // namespace

double mean_average_precision(const ScoreTable& table,
                              const std::vector<std::uint32_t>& class_subset) {
    table.validate();
    check_subset(table, class_subset);
    double total = 0.0;
    std::size_t counted = 0;
    for (std::uint32_t c : class_subset) {
        if (auto ap = column_ap(table, c)) {
            total += *ap;
            ++counted;
        }
    }
    if (counted == 0) {
        throw EvaluationError("mAP: every class in the subset has no positives");
    }
    return total / static_cast<double>(counted);
}

MetricsReport::AtK f1_at_k(const ScoreTable& table, std::size_t k) {
    table.validate();
    if (k < 1 || k > table.classes()) {
        throw ArgumentError("f1_at_k: k=" + std::to_string(k) +
                            " out of range for " + std::to_string(table.classes()) +
                            " classes");
    }
    std::size_t hits = 0;
    std::size_t positives = 0;
    std::vector<std::uint32_t> idx(table.classes());
    for (std::size_t r = 0; r < table.records(); ++r) {
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                          idx.end(), [&](std::uint32_t a, std::uint32_t b) {
                              if (table.scores.at(r, a) != table.scores.at(r, b)) {
                                  return table.scores.at(r, a) > table.scores.at(r, b);
                              }
                              return a < b;
                          });
        for (std::size_t i = 0; i < k; ++i) {
            if (table.truths.at(r, idx[i]) != 0.0) ++hits;
        }
        for (std::size_t c = 0; c < table.classes(); ++c) {
            if (table.truths.at(r, c) != 0.0) ++positives;
        }
    }

    MetricsReport::AtK out;
    out.k = k;
    out.precision = static_cast<double>(hits) /
                    static_cast<double>(k * table.records());
    out.recall = positives == 0
                     ? 0.0
                     : static_cast<double>(hits) / static_cast<double>(positives);
    out.f1 = (out.precision + out.recall) == 0.0
                 ? 0.0
                 : 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

MetricsReport compute_metrics(const ScoreTable& table,
                              const std::vector<std::uint32_t>& class_subset,
                              const std::vector<std::size_t>& ks) {
    table.validate();
    check_subset(table, class_subset);

    MetricsReport report;
    report.record_count = table.records();
    report.class_count = class_subset.size();

    double total = 0.0;
    std::size_t counted = 0;
    for (std::uint32_t c : class_subset) {
        auto ap = column_ap(table, c);
        report.per_class_ap.push_back(ap);
        if (ap) {
            total += *ap;
            ++counted;
        }
    }
    if (counted == 0) {
        throw EvaluationError("mAP: every class in the subset has no positives");
    }
    report.map = total / static_cast<double>(counted);

    for (std::size_t k : ks) {
        report.at_k.push_back(f1_at_k(table, k));
    }
    return report;
}

std::string metrics_report_json(const MetricsReport& report) {
    nlohmann::json j;
    j["map"] = report.map;
    j["record_count"] = report.record_count;
    j["class_count"] = report.class_count;
    nlohmann::json aps = nlohmann::json::array();
    for (const auto& ap : report.per_class_ap) {
        if (ap) {
            aps.push_back(*ap);
        } else {
            aps.push_back(nullptr);
        }
    }
    j["per_class_ap"] = aps;
    nlohmann::json at_k = nlohmann::json::array();
    for (const auto& e : report.at_k) {
        at_k.push_back({{"k", e.k},
                        {"precision", e.precision},
                        {"recall", e.recall},
                        {"f1", e.f1}});
    }
    j["at_k"] = at_k;
    return j.dump(2) + "\n";
}

std::string metrics_report_table(const MetricsReport& report) {
    std::string header = "mAP     ";
    std::string values;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-8.4f", report.map);
    values += buf;
    for (const auto& e : report.at_k) {
        std::snprintf(buf, sizeof(buf), "F1 k=%-3zu", e.k);
        header += buf;
        std::snprintf(buf, sizeof(buf), "%-8.4f", e.f1);
        values += buf;
    }
    return header + "\n" + values + "\n";
}

}  // namespace cdec
