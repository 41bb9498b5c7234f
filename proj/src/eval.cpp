#include "cwlab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace cwlab::eval {

namespace {

void check_list(std::span<const double> v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + " statistics are empty");
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + " statistics contain a non-finite value");
        }
    }
}

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

std::size_t count_below(const std::vector<double>& sorted, double t) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), t) -
                                    sorted.begin());
}

std::size_t count_at_most(const std::vector<double>& sorted, double t) {
    return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                    sorted.begin());
}

nlohmann::ordered_json metrics_json(const ThresholdChoice& c) {
    nlohmann::ordered_json j;
    // JSON has no infinities; sentinels are written as strings.
    if (std::isinf(c.threshold)) {
        j["t"] = c.threshold > 0 ? "inf" : "-inf";
    } else {
        j["t"] = c.threshold;
    }
    const Metrics& m = c.metrics;
    j["metrics"] = {{"tp", m.counts.tp},         {"fn", m.counts.fn},
                    {"tn", m.counts.tn},         {"fp", m.counts.fp},
                    {"accuracy", m.accuracy},    {"precision", m.precision},
                    {"recall", m.recall},        {"precision_undefined", m.precision_undefined}};
    return j;
}

}  // namespace

double auroc(std::span<const double> attacked, std::span<const double> clean) {
    check_list(attacked, "attacked");
    check_list(clean, "clean");
    const auto z = sorted_copy(clean);
    // Twice the pair score, kept integral so the result is exact.
    std::size_t twice = 0;
    for (double y : attacked) {
        const std::size_t le = count_at_most(z, y);
        const std::size_t lt = count_below(z, y);
        twice += 2 * (z.size() - le) + (le - lt);
    }
    return static_cast<double>(twice) /
           (2.0 * static_cast<double>(attacked.size()) * static_cast<double>(clean.size()));
}

std::vector<RocPoint> roc_curve(std::span<const double> attacked, std::span<const double> clean) {
    check_list(attacked, "attacked");
    check_list(clean, "clean");
    const auto y = sorted_copy(attacked);
    const auto z = sorted_copy(clean);
    std::vector<double> pooled(y);
    pooled.insert(pooled.end(), z.begin(), z.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<RocPoint> roc;
    roc.push_back({-std::numeric_limits<double>::infinity(), 0.0, 0.0});
    const auto ny = static_cast<double>(y.size());
    const auto nz = static_cast<double>(z.size());
    for (double t : pooled) {
        roc.push_back({t, static_cast<double>(count_at_most(z, t)) / nz,
                       static_cast<double>(count_at_most(y, t)) / ny});
    }
    return roc;
}

double trapezoid_area(std::span<const RocPoint> roc) {
    double area = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i) {
        area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) * 0.5;
    }
    return area;
}

Metrics metrics_from_counts(const Confusion& c) {
    Metrics m;
    m.counts = c;
    const auto total = static_cast<double>(c.tp + c.fn + c.tn + c.fp);
    m.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    if (c.tp + c.fp == 0) {
        m.precision = 0.0;
        m.precision_undefined = true;
    } else {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    return m;
}

Metrics threshold_metrics(std::span<const double> attacked, std::span<const double> clean,
                          double threshold) {
    Confusion c;
    for (double y : attacked) (y < threshold ? c.tp : c.fn)++;
    for (double z : clean) (z >= threshold ? c.tn : c.fp)++;
    return metrics_from_counts(c);
}

double rule_objective(const Metrics& m, ThresholdRule rule) {
    switch (rule) {
        case ThresholdRule::Weighted:
            return 0.5 * m.recall + 0.25 * m.accuracy + 0.25 * m.precision;
        case ThresholdRule::Accuracy:
            return m.accuracy;
    }
    return 0.0;
}

ThresholdChoice choose_threshold(std::span<const double> attacked, std::span<const double> clean,
                                 ThresholdRule rule) {
    check_list(attacked, "attacked");
    check_list(clean, "clean");
    std::vector<double> pooled(attacked.begin(), attacked.end());
    pooled.insert(pooled.end(), clean.begin(), clean.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<double> candidates;
    candidates.push_back(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
        candidates.push_back(pooled[i] + 0.5 * (pooled[i + 1] - pooled[i]));
    }
    candidates.push_back(std::numeric_limits<double>::infinity());

    ThresholdChoice best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (double t : candidates) {
        const Metrics m = threshold_metrics(attacked, clean, t);
        const double score = rule_objective(m, rule);
        if (score > best_score) {
            best_score = score;
            best = {t, m};
        }
    }
    return best;
}

RocReport make_report(std::span<const double> attacked, std::span<const double> clean) {
    RocReport r;
    r.auroc = auroc(attacked, clean);
    r.roc = roc_curve(attacked, clean);
    r.rule1 = choose_threshold(attacked, clean, ThresholdRule::Weighted);
    r.rule2 = choose_threshold(attacked, clean, ThresholdRule::Accuracy);
    r.n_attacked = attacked.size();
    r.n_clean = clean.size();
    return r;
}

std::string report_json(const RocReport& report) {
    nlohmann::ordered_json j;
    j["auroc"] = report.auroc;
    j["orientation"] = "attacked statistic below threshold is flagged";
    j["roc"] = nlohmann::ordered_json::array();
    for (const RocPoint& p : report.roc) {
        nlohmann::ordered_json pj;
        pj["fpr"] = p.fpr;
        pj["tpr"] = p.tpr;
        if (std::isinf(p.threshold)) {
            pj["t"] = "-inf";
        } else {
            pj["t"] = p.threshold;
        }
        j["roc"].push_back(std::move(pj));
    }
    j["rule1"] = metrics_json(report.rule1);
    j["rule2"] = metrics_json(report.rule2);
    j["counts"] = {{"attacked", report.n_attacked}, {"clean", report.n_clean}};
    return j.dump(1) + "\n";
}

}  // namespace cwlab::eval
