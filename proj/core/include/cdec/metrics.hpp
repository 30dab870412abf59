#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdec/matrix.hpp"

namespace cdec {

// Scores and multi-hot truths, one row per record, one column per class.
struct ScoreTable {
    Matrix scores;
    Matrix truths;

    std::size_t records() const { return scores.rows(); }
    std::size_t classes() const { return scores.cols(); }

    void validate() const;  // shapes equal, truths 0/1
};

struct MetricsReport {
    struct AtK {
        std::size_t k = 0;
        double precision = 0.0;
        double recall = 0.0;
        double f1 = 0.0;
    };

    double map = 0.0;
    // One entry per evaluated class; nullopt marks classes with no
    // positive record (excluded from mAP).
    std::vector<std::optional<double>> per_class_ap;
    std::vector<AtK> at_k;
    std::size_t record_count = 0;
    std::size_t class_count = 0;
};

// Records ranked by descending score, ties broken by ascending record
// index; AP = mean precision at the positive records' ranks. nullopt when
// the class has no positives.
std::optional<double> average_precision(const std::vector<double>& scores,
                                        const std::vector<std::uint8_t>& truths);

// Unweighted mean of per-class AP over `class_subset` (column indices),
// skipping zero-positive classes. Throws EvaluationError when every class
// in the subset is skipped.
double mean_average_precision(const ScoreTable& table,
                              const std::vector<std::uint32_t>& class_subset);

// Micro-averaged precision/recall/F1 when every record predicts its top-k
// classes (score ties broken by ascending class index).
MetricsReport::AtK f1_at_k(const ScoreTable& table, std::size_t k);

MetricsReport compute_metrics(const ScoreTable& table,
                              const std::vector<std::uint32_t>& class_subset,
                              const std::vector<std::size_t>& ks);

std::string metrics_report_json(const MetricsReport& report);

// Aligned text table: mAP, then F1 (with P/R) per k.
std::string metrics_report_table(const MetricsReport& report);

}  // namespace cdec
