#include "cwlab/counterdetect.hpp"

#include <cmath>
#include <stdexcept>

#include "cwlab/io.hpp"
#include "cwlab/parallel.hpp"

namespace cwlab {

void CounterConfig::validate() const {
    if (mode == CounterMode::Theorem) {
        if (!(b > 0.0) || !(step > 0.0)) {
            throw std::invalid_argument("theorem-mode counter attack needs b > 0 and step > 0");
        }
    }
    if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");
}

CounterParams counter_params(double c, double C, double eps) {
    if (!(c > 0.0) || !(C >= c) || !(eps > 0.0)) {
        throw std::invalid_argument("counter_params needs c > 0, C >= c, eps > 0");
    }
    const double ratio = 1.0 + C / c;
    return {8.0 * eps / c, 1.0 / (16.0 * ratio * ratio)};
}

double epsilon_for_point(std::span<const double> x_k, std::span<const double> x_star) {
    return distance(x_k, x_star, Norm::L2) + kEpsilonOffset;
}

CounterRecord counter_attack(const MlpModel& model, std::span<const double> x_start,
                             const CounterConfig& cfg, int class_original) {
    cfg.validate();
    AttackConfig ac;
    ac.norm = cfg.norm;
    ac.confidence = cfg.confidence;
    ac.max_iters = cfg.j_max;
    ac.stop = StopMode::Practical;
    ac.trace_iterates = cfg.trace_iterates;
    ac.seed = cfg.seed;

    AttackTrace trace;
    if (cfg.mode == CounterMode::Theorem) {
        ac.penalty = cfg.b;
        ac.constant_step = cfg.step;
        trace = cw_attack(model, x_start, ac);
    } else {
        ac.alpha0 = cfg.alpha0;
        ac.n0 = cfg.n0;
        ac.search = cfg.b_search;
        trace = binary_search_penalty(model, x_start, ac).trace;
    }

    CounterRecord rec;
    rec.start = trace.origin;
    rec.class_start = trace.class_before;
    rec.class_original = class_original;
    rec.b = trace.penalty_weight;
    rec.stopped = trace.success;
    if (rec.stopped) {
        rec.jstar = trace.first_feasible_iter;
        rec.stop_point = *trace.last_feasible;
        rec.class_stop = trace.last_feasible_class;
    } else {
        rec.stop_point = trace.closest_point;
        rec.class_stop = classify(model, rec.stop_point);
    }
    rec.statistic = distance(rec.start, rec.stop_point, cfg.norm);
    rec.returned = rec.stopped && class_original != 0 && rec.class_stop == class_original;
    rec.iterates = std::move(trace.iterates);
    return rec;
}

DetectionResult detection_run(const MlpModel& model, const LabeledDataset& clean,
                              std::span<const AttackTrace> attacked, const CounterConfig& cfg,
                              std::size_t workers) {
    CounterConfig clean_cfg = cfg;
    clean_cfg.mode = CounterMode::Practical;

    DetectionResult res;
    res.clean.resize(clean.size());
    parallel_for(clean.size(), workers, [&](std::size_t i) {
        res.clean[i] = counter_attack(model, clean.points[i], clean_cfg);
        res.clean[i].id = i;
    });

    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < attacked.size(); ++i) {
        if (attacked[i].success) {
            ok.push_back(i);
        } else {
            ++res.failed_primary;
        }
    }
    res.attacked.resize(ok.size());
    parallel_for(ok.size(), workers, [&](std::size_t k) {
        const AttackTrace& tr = attacked[ok[k]];
        res.attacked[k] = counter_attack(model, tr.adversarial(), cfg, tr.class_before);
        res.attacked[k].id = ok[k];
    });

    for (const CounterRecord& r : res.clean) {
        if (r.stopped) {
            res.clean_stats.push_back(r.statistic);
        } else {
            ++res.unstopped_clean;
        }
    }
    for (const CounterRecord& r : res.attacked) {
        if (r.stopped) {
            res.attacked_stats.push_back(r.statistic);
        } else {
            ++res.unstopped_attacked;
        }
    }
    return res;
}

double return_rate(std::span<const CounterRecord> records) {
    std::size_t known = 0;
    std::size_t back = 0;
    for (const CounterRecord& r : records) {
        if (r.class_original == 0) continue;
        ++known;
        if (r.returned) ++back;
    }
    return known == 0 ? 0.0 : static_cast<double>(back) / static_cast<double>(known);
}

std::string stats_csv_header() { return "id,cohort,D,jstar,stopped,returned\n"; }

std::string stats_csv_row(const CounterRecord& rec, bool attacked_cohort) {
    std::string row = std::to_string(rec.id);
    row += attacked_cohort ? ",attacked," : ",clean,";
    row += io::format_double(rec.statistic) + ",";
    row += std::to_string(rec.jstar) + ",";
    row += rec.stopped ? "1," : "0,";
    row += rec.returned ? "1\n" : "0\n";
    return row;
}

}  // namespace cwlab
