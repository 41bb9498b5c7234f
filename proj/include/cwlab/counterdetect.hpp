#pragma once

// Counter attack: a second CW attack launched from a candidate input that
// stops at the first iterate whose class differs from the start class. The
// distance travelled is the detection statistic; inputs that were already
// attacked sit close to a decision boundary and yield small values.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cwlab/attack.hpp"
#include "cwlab/dataset.hpp"

namespace cwlab {

enum class CounterMode {
    Theorem,    // fixed penalty b and constant step alpha
    Practical,  // bisection on b, decaying step schedule
};

struct CounterConfig {
    CounterMode mode = CounterMode::Practical;
    double b = 1.0;                          // theorem mode
    double step = 0.01;                      // theorem mode
    PenaltySearch b_search{1e-3, 1e10, 20};  // practical mode
    double alpha0 = 0.01;                    // practical mode
    double n0 = 100.0;                       // practical mode
    int j_max = 2048;
    Norm norm = Norm::L2;
    double confidence = 0.0;
    bool trace_iterates = false;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CounterRecord {
    std::size_t id = 0;
    Vec start;
    int jstar = -1;          // first iteration in the counter-feasible set
    Vec stop_point;          // x_{k,j*}, or the closest approach when not stopped
    double statistic = 0.0;  // dist_q(start, stop_point)
    bool stopped = false;
    int class_start = 0;
    int class_stop = 0;
    int class_original = 0;  // 0 when unknown (clean samples)
    bool returned = false;   // stopped and class_stop == class_original
    double b = 0.0;
    std::vector<Vec> iterates;  // start first, when tracing
};

struct CounterParams {
    double b = 0.0;
    double alpha = 0.0;
};

/// b = 8 eps / c and alpha = 1 / (16 (1 + C/c)^2).
CounterParams counter_params(double c, double C, double eps);

/// ||x_k - x*||_2 + 2e-4; the offset covers a 1e-4 discretisation of the domain.
double epsilon_for_point(std::span<const double> x_k, std::span<const double> x_star);

inline constexpr double kEpsilonOffset = 2e-4;

CounterRecord counter_attack(const MlpModel& model, std::span<const double> x_start,
                             const CounterConfig& cfg, int class_original = 0);

struct DetectionResult {
    std::vector<double> clean_stats;     // stopped clean records only
    std::vector<double> attacked_stats;  // stopped attacked records only
    std::vector<CounterRecord> clean;
    std::vector<CounterRecord> attacked;  // one per successful primary attack
    std::size_t failed_primary = 0;
    std::size_t unstopped_clean = 0;
    std::size_t unstopped_attacked = 0;
};

/// Counter attacks on the clean cohort and on every successful primary
/// attack. Clean points always run in practical mode. Records keep the
/// index of their sample in the input lists.
DetectionResult detection_run(const MlpModel& model, const LabeledDataset& clean,
                              std::span<const AttackTrace> attacked, const CounterConfig& cfg,
                              std::size_t workers = 1);

/// Fraction of records with a known original class whose counter attack
/// returned to it. Zero for an empty input.
double return_rate(std::span<const CounterRecord> records);

std::string stats_csv_header();
std::string stats_csv_row(const CounterRecord& rec, bool attacked_cohort);

}  // namespace cwlab
