#pragma once

// Detection evaluation. Orientation: attacked statistics (Y) are expected to
// be smaller than clean ones (Z); a sample is flagged as attacked when its
// statistic lies below the threshold.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cwlab::eval {

/// (#{y < z} + 0.5 #{y == z}) / (|Y| |Z|). Throws on empty or non-finite input.
double auroc(std::span<const double> attacked, std::span<const double> clean);

struct RocPoint {
    double threshold = 0.0;  // statistic <= threshold counts as positive
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Starts at (0,0) (threshold -inf) and sweeps every distinct pooled value.
std::vector<RocPoint> roc_curve(std::span<const double> attacked, std::span<const double> clean);

double trapezoid_area(std::span<const RocPoint> roc);

struct Confusion {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
};

struct Metrics {
    Confusion counts;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_undefined = false;  // tp + fp == 0, precision reported as 0
};

Metrics metrics_from_counts(const Confusion& c);

/// TP = #{y < t}, FN = #{y >= t}, TN = #{z >= t}, FP = #{z < t}.
Metrics threshold_metrics(std::span<const double> attacked, std::span<const double> clean,
                          double threshold);

enum class ThresholdRule {
    Weighted,  // maximise 0.5 recall + 0.25 accuracy + 0.25 precision
    Accuracy,  // maximise accuracy
};

double rule_objective(const Metrics& m, ThresholdRule rule);

struct ThresholdChoice {
    double threshold = 0.0;
    Metrics metrics;
};

/// Scans midpoints between consecutive distinct pooled values plus -inf/+inf;
/// ties go to the smaller threshold.
ThresholdChoice choose_threshold(std::span<const double> attacked, std::span<const double> clean,
                                 ThresholdRule rule);

struct RocReport {
    double auroc = 0.0;
    std::vector<RocPoint> roc;
    ThresholdChoice rule1;
    ThresholdChoice rule2;
    std::size_t n_attacked = 0;
    std::size_t n_clean = 0;
};

RocReport make_report(std::span<const double> attacked, std::span<const double> clean);

/// {auroc, orientation, roc:[{fpr,tpr,t}], rule1:{t,metrics}, rule2:{t,metrics}, counts}
std::string report_json(const RocReport& report);

}  // namespace cwlab::eval
