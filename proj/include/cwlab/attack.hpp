#pragma once

// Carlini-Wagner attack as projected generalized-gradient descent on
//
//     F(x) = dist(x0, x)^p + a * f(x),   x in [0,1]^n
//
// with f the margin penalty on the logits. The l2 variant uses the squared
// Euclidean distance; the l-infinity variant uses the hinge surrogate
// sum_i max(|x_i - x0_i| - tau, 0) with a shrinking tau.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwlab/network.hpp"

namespace cwlab {

enum class Norm { L2, Linf };

/// Theory runs every iteration; Practical stops at the first feasible iterate.
enum class StopMode { Theory, Practical };

std::string to_string(Norm norm);
Norm norm_from_string(const std::string& s);

double distance(std::span<const double> a, std::span<const double> b, Norm norm);

/// Geometric bisection range for the penalty weight.
struct PenaltySearch {
    double lo = 1e-3;
    double hi = 1e10;
    int steps = 20;
};

struct AttackConfig {
    Norm norm = Norm::L2;
    double penalty = 10.0;                 // used when `search` is empty
    std::optional<PenaltySearch> search;
    double confidence = 0.0;               // eta
    int max_iters = 1024;
    double alpha0 = 0.01;
    double n0 = 100.0;
    std::optional<double> constant_step;   // replaces the schedule when set
    std::optional<int> target;             // targeted attack toward this class
    StopMode stop = StopMode::Theory;
    bool trace_iterates = false;
    std::uint64_t seed = 0;

    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    double objective = 0.0;
    double penalty = 0.0;
    double dist = 0.0;
    int cls = 0;
};

struct AttackTrace {
    Vec origin;
    Vec final_point;
    int class_before = 0;
    int class_after = 0;       // class of final_point
    bool success = false;      // some iterate was feasible
    std::optional<Vec> last_feasible;
    int last_feasible_iter = -1;
    int last_feasible_class = 0;
    int first_feasible_iter = -1;
    int iterations_run = 0;
    Norm norm = Norm::L2;
    double final_dist = 0.0;   // dist(origin, final_point) in the attack norm
    double penalty_weight = 0.0;
    /// Iterate with the smallest penalty value seen (origin included).
    Vec closest_point;
    double closest_penalty = 0.0;
    std::vector<IterationRecord> records;  // filled when tracing
    std::vector<Vec> iterates;             // origin first, filled when tracing

    /// Final iterate if feasible, otherwise the last feasible iterate.
    /// Only meaningful when success is true.
    const Vec& adversarial() const;
    double adversarial_dist() const;
};

/// Margin penalty and the runner-up class used for its gradient.
struct PenaltyValue {
    double value = 0.0;
    int other = 0;  // 1-based class paired with the reference class
};

/// Untargeted (target empty): max{Z_t - max_{i != t} Z_i - eta, 0}.
/// Targeted to class t: max{max_{i != t} Z_i - Z_t - eta, 0}.
/// `t` is 1-based. Ties for the runner-up resolve to the smallest index.
PenaltyValue penalty_f(std::span<const double> logits, int t, double eta, bool targeted);
double penalty_f(const MlpModel& model, std::span<const double> x, int t, double eta,
                 bool targeted);

/// Gradient selection of penalty_f at x: zero when f(x) = 0.
Vec penalty_gradient(const MlpModel& model, std::span<const double> x, int t, double eta,
                     bool targeted);

/// l2: ||x - x0||^2 + a f(x). l-infinity: hinge surrogate with threshold tau.
double objective_F(const MlpModel& model, std::span<const double> x,
                   std::span<const double> origin, double a, Norm norm, int t, double eta,
                   bool targeted, double tau = 0.0);

Vec project_box(std::span<const double> x);

/// alpha0 * n0 / (n0 + i)
double lr_schedule(double alpha0, double n0, int i);

/// 2 sqrt(d) / c, with c the smallest penalty-gradient norm over regions that
/// meet the decision boundary. Large enough that every stationary point of
/// the l2 objective in the open box lies on the boundary.
double penalty_lower_bound(std::size_t dim, double min_boundary_grad);

/// One attack run at the configured penalty weight (cfg.search ignored).
AttackTrace cw_attack(const MlpModel& model, std::span<const double> x0, const AttackConfig& cfg);

struct SearchResult {
    bool found = false;
    double penalty = 0.0;
    AttackTrace trace;  // trace at `penalty`, or at the upper bound on failure
};

/// Geometric bisection on the penalty weight over cfg.search (default range
/// when empty): smallest weight whose run succeeds within max_iters.
SearchResult binary_search_penalty(const MlpModel& model, std::span<const double> x0,
                                   const AttackConfig& cfg);

// Trace files.
std::string attack_csv_header();
std::string attack_csv_row(std::size_t id, const AttackTrace& trace);
std::string iteration_jsonl(const AttackTrace& trace);

}  // namespace cwlab
