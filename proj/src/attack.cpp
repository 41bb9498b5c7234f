#include "cwlab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "cwlab/io.hpp"
#include "cwlab/kernels.hpp"

namespace cwlab {

namespace {

void check_class(int t, std::size_t classes) {
    if (t < 1 || static_cast<std::size_t>(t) > classes) {
        throw std::invalid_argument("class index " + std::to_string(t) + " outside 1.." +
                                    std::to_string(classes));
    }
}

Vec penalty_seed(std::size_t classes, int t, int other, bool targeted) {
    Vec seed(classes, 0.0);
    const auto ti = static_cast<std::size_t>(t - 1);
    const auto oi = static_cast<std::size_t>(other - 1);
    seed[ti] = targeted ? -1.0 : 1.0;
    seed[oi] = targeted ? 1.0 : -1.0;
    return seed;
}

double distance_term(std::span<const double> x, std::span<const double> origin, Norm norm,
                     double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - origin[i];
        if (norm == Norm::L2) {
            s += d * d;
        } else {
            s += std::max(std::abs(d) - tau, 0.0);
        }
    }
    return s;
}

}  // namespace

std::string to_string(Norm norm) { return norm == Norm::L2 ? "l2" : "linf"; }

Norm norm_from_string(const std::string& s) {
    if (s == "l2" || s == "2") return Norm::L2;
    if (s == "linf" || s == "inf") return Norm::Linf;
    throw std::invalid_argument("unknown norm '" + s + "' (expected l2 or linf)");
}

double distance(std::span<const double> a, std::span<const double> b, Norm norm) {
    if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        s = norm == Norm::L2 ? s + d * d : std::max(s, d);
    }
    return norm == Norm::L2 ? std::sqrt(s) : s;
}

void AttackConfig::validate() const {
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
        throw std::invalid_argument("penalty weight must be finite and >= 0");
    }
    if (search) {
        if (!(search->lo > 0.0 && search->lo < search->hi)) {
            throw std::invalid_argument("penalty search needs 0 < lo < hi");
        }
        if (search->steps < 0) throw std::invalid_argument("penalty search steps must be >= 0");
    }
    if (!(confidence >= 0.0)) throw std::invalid_argument("confidence must be >= 0");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
    if (!(alpha0 > 0.0) || !(n0 > 0.0)) throw std::invalid_argument("alpha0 and n0 must be > 0");
    if (constant_step && !(*constant_step > 0.0)) {
        throw std::invalid_argument("constant step must be > 0");
    }
}

const Vec& AttackTrace::adversarial() const {
    return last_feasible ? *last_feasible : final_point;
}

double AttackTrace::adversarial_dist() const { return distance(origin, adversarial(), norm); }

PenaltyValue penalty_f(std::span<const double> logits, int t, double eta, bool targeted) {
    check_class(t, logits.size());
    const auto ti = static_cast<std::size_t>(t - 1);
    std::size_t other = ti == 0 ? 1 : 0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (i != ti && logits[i] > logits[other]) other = i;
    }
    const double margin = targeted ? logits[other] - logits[ti] : logits[ti] - logits[other];
    return {std::max(margin - eta, 0.0), static_cast<int>(other) + 1};
}

double penalty_f(const MlpModel& model, std::span<const double> x, int t, double eta,
                 bool targeted) {
    return penalty_f(forward_logits(model, x), t, eta, targeted).value;
}

Vec penalty_gradient(const MlpModel& model, std::span<const double> x, int t, double eta,
                     bool targeted) {
    const PenaltyValue pv = penalty_f(forward_logits(model, x), t, eta, targeted);
    if (!(pv.value > 0.0)) return Vec(model.input_dim(), 0.0);
    return input_gradient(model, x, penalty_seed(model.num_classes(), t, pv.other, targeted));
}

double objective_F(const MlpModel& model, std::span<const double> x,
                   std::span<const double> origin, double a, Norm norm, int t, double eta,
                   bool targeted, double tau) {
    if (x.size() != origin.size()) throw std::invalid_argument("objective_F: dimension mismatch");
    return distance_term(x, origin, norm, tau) + a * penalty_f(model, x, t, eta, targeted);
}

Vec project_box(std::span<const double> x) {
    Vec out(x.begin(), x.end());
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
    return out;
}

double lr_schedule(double alpha0, double n0, int i) {
    return alpha0 * n0 / (n0 + static_cast<double>(i));
}

double penalty_lower_bound(std::size_t dim, double min_boundary_grad) {
    if (!(min_boundary_grad > 0.0)) {
        throw std::invalid_argument("minimum boundary gradient norm must be > 0");
    }
    return 2.0 * std::sqrt(static_cast<double>(dim)) / min_boundary_grad;
}

AttackTrace cw_attack(const MlpModel& model, std::span<const double> x0, const AttackConfig& cfg) {
    cfg.validate();
    if (x0.size() != model.input_dim()) throw std::invalid_argument("cw_attack: dimension mismatch");
    for (double v : x0) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("cw_attack: start outside [0,1]^n");
    }
    const std::size_t n = x0.size();
    const std::size_t classes = model.num_classes();

    AttackTrace tr;
    tr.origin.assign(x0.begin(), x0.end());
    tr.penalty_weight = cfg.penalty;
    tr.norm = cfg.norm;
    Vec logits = forward_logits(model, x0);
    tr.class_before = classify_logits(logits);
    if (tr.class_before == 0) {
        throw std::invalid_argument("cw_attack: start point lies on a decision boundary");
    }
    const bool targeted = cfg.target.has_value();
    if (targeted) {
        check_class(*cfg.target, classes);
        if (*cfg.target == tr.class_before) {
            throw std::invalid_argument("cw_attack: target equals the original class");
        }
    }
    const int ref = targeted ? *cfg.target : tr.class_before;
    auto feasible = [&](int cls) { return targeted ? cls == ref : cls != tr.class_before; };

    Vec x = tr.origin;
    Vec grad(n);
    double tau = 1.0;
    PenaltyValue pv = penalty_f(logits, ref, cfg.confidence, targeted);
    tr.closest_point = x;
    tr.closest_penalty = pv.value;
    int cls = tr.class_before;
    if (cfg.trace_iterates) tr.iterates.push_back(x);

    for (int i = 0; i < cfg.max_iters; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double d = x[k] - tr.origin[k];
            if (cfg.norm == Norm::L2) {
                grad[k] = 2.0 * d;
            } else {
                grad[k] = std::abs(d) > tau ? (d > 0.0 ? 1.0 : -1.0) : 0.0;
            }
        }
        if (pv.value > 0.0 && cfg.penalty != 0.0) {
            const Vec g =
                input_gradient(model, x, penalty_seed(classes, ref, pv.other, targeted));
            for (std::size_t k = 0; k < n; ++k) grad[k] += cfg.penalty * g[k];
        }
        const double step = cfg.constant_step ? *cfg.constant_step
                                              : lr_schedule(cfg.alpha0, cfg.n0, i);
        kernels::step_clamp(x, grad, step);

        logits = forward_logits(model, x);
        cls = classify_logits(logits);
        pv = penalty_f(logits, ref, cfg.confidence, targeted);
        tr.iterations_run = i + 1;
        if (cfg.norm == Norm::Linf && distance(x, tr.origin, Norm::Linf) < tau) tau *= 0.9;
        if (pv.value < tr.closest_penalty) {
            tr.closest_penalty = pv.value;
            tr.closest_point = x;
        }
        if (cfg.trace_iterates) {
            tr.iterates.push_back(x);
            tr.records.push_back({i + 1,
                                  distance_term(x, tr.origin, cfg.norm, tau) + cfg.penalty * pv.value,
                                  pv.value, distance(x, tr.origin, cfg.norm), cls});
        }
        if (feasible(cls)) {
            tr.success = true;
            tr.last_feasible = x;
            tr.last_feasible_iter = i + 1;
            tr.last_feasible_class = cls;
            if (tr.first_feasible_iter < 0) tr.first_feasible_iter = i + 1;
            if (cfg.stop == StopMode::Practical) break;
        }
    }
    tr.final_point = x;
    tr.class_after = cls;
    tr.final_dist = distance(tr.origin, x, cfg.norm);
    return tr;
}

SearchResult binary_search_penalty(const MlpModel& model, std::span<const double> x0,
                                   const AttackConfig& cfg) {
    const PenaltySearch range = cfg.search.value_or(PenaltySearch{});
    AttackConfig run_cfg = cfg;
    run_cfg.search = range;
    run_cfg.validate();
    run_cfg.search.reset();
    auto run = [&](double a) {
        run_cfg.penalty = a;
        return cw_attack(model, x0, run_cfg);
    };

    SearchResult res;
    AttackTrace upper = run(range.hi);
    if (!upper.success) {
        res.penalty = range.hi;
        res.trace = std::move(upper);
        return res;
    }
    AttackTrace lower = run(range.lo);
    if (lower.success) {
        res.found = true;
        res.penalty = range.lo;
        res.trace = std::move(lower);
        return res;
    }
    double lo = range.lo;
    double hi = range.hi;
    AttackTrace best = std::move(upper);
    for (int s = 0; s < range.steps; ++s) {
        const double mid = std::sqrt(lo * hi);
        AttackTrace t = run(mid);
        if (t.success) {
            hi = mid;
            best = std::move(t);
        } else {
            lo = mid;
        }
    }
    res.found = true;
    res.penalty = hi;
    res.trace = std::move(best);
    return res;
}

std::string attack_csv_header() { return "id,success,iters,a,dist,class_before,class_after\n"; }

std::string attack_csv_row(std::size_t id, const AttackTrace& trace) {
    const int cls_after = trace.success ? trace.last_feasible_class : trace.class_after;
    std::string row = std::to_string(id);
    row += trace.success ? ",1," : ",0,";
    row += std::to_string(trace.iterations_run) + ",";
    row += io::format_double(trace.penalty_weight) + ",";
    row += io::format_double(trace.adversarial_dist()) + ",";
    row += std::to_string(trace.class_before) + ",";
    row += std::to_string(cls_after) + "\n";
    return row;
}

std::string iteration_jsonl(const AttackTrace& trace) {
    std::string out;
    for (const IterationRecord& r : trace.records) {
        nlohmann::ordered_json j;
        j["iter"] = r.iter;
        j["F"] = r.objective;
        j["f"] = r.penalty;
        j["dist"] = r.dist;
        j["class"] = r.cls;
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace cwlab
