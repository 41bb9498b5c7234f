// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cwlab/experiment.hpp"
#include "cwlab/io.hpp"

using namespace cwlab;
namespace fs = std::filesystem;

namespace {

constexpr double kMinAccuracy = 0.90;
constexpr double kTrainSeconds = 30.0;
constexpr int kAttackIters = 1024;
constexpr double kAttackSeconds = 300.0;
constexpr double kMaxInversion = 0.02;
constexpr double kFinalAuroc = 0.99;
constexpr double kFig4Seconds = 1800.0;
constexpr double kMinReturnRate = 0.99;
constexpr double kNearBoundary = 1e-2;
constexpr double kBoundaryShare = 0.95;
constexpr double kTrapezoidTol = 1e-9;
constexpr double kGradRelTol = 1e-5;
constexpr double kKinkMargin = 1e-3;
constexpr double kFdStep = 1e-6;
constexpr double kAffineTol = 1e-9;
constexpr double kPublishedTol = 1e-4;
constexpr double kTargetedAurocSlack = 0.05;
constexpr double kOracleSeconds = 60.0;

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cwlab_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Oracles for criterion 7, independent of the library code they check.

double pair_count(const std::vector<double>& y, const std::vector<double>& z) {
    double num = 0.0;
    for (double a : y) {
        for (double b : z) num += a < b ? 1.0 : (a == b ? 0.5 : 0.0);
    }
    return num / (static_cast<double>(y.size()) * static_cast<double>(z.size()));
}

std::vector<double> random_ints(std::mt19937_64& rng, std::size_t n, int range) {
    std::uniform_int_distribution<int> d(0, range);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

Vec fd_gradient(const MlpModel& m, const Vec& x, const Vec& seed) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec p = x, q = x;
        p[i] += kFdStep;
        q[i] -= kFdStep;
        const Vec zp = forward_logits(m, p), zq = forward_logits(m, q);
        double s = 0.0;
        for (std::size_t j = 0; j < seed.size(); ++j) s += seed[j] * (zp[j] - zq[j]);
        g[i] = s / (2.0 * kFdStep);
    }
    return g;
}

bool far_from_kinks(const MlpModel& m, const Vec& x) {
    for (const Vec& layer : hidden_preactivations(m, x)) {
        for (double v : layer) {
            if (std::abs(v) < kKinkMargin) return false;
        }
    }
    return true;
}

bool files_equal(const fs::path& a, const fs::path& b) {
    return fs::exists(a) && fs::exists(b) && io::read_file(a) == io::read_file(b);
}

}  // namespace

int main() {
    const ExperimentConfig cfg = default_experiment_config();

    // 1. Accuracy and training time.
    auto t0 = std::chrono::steady_clock::now();
    const auto [train_set, test_set] = split_head(make_dataset(cfg), cfg.data.n_train);
    const MlpModel trained = train_model(cfg, train_set);
    const double train_s = seconds_since(t0);
    const double acc = accuracy(trained, test_set);
    report(1, acc >= kMinAccuracy && train_s < kTrainSeconds,
           "test accuracy " + fmt("%.4f", acc) + " (>= 0.90), train time " + fmt("%.2f", train_s) +
               " s (< 30 s)");

    const Prepared prep = prepare(cfg);

    // 2. Attack success at 1024 iterations, default search range.
    t0 = std::chrono::steady_clock::now();
    ExperimentConfig plain = cfg;
    plain.geometry = false;
    const AttackConfig ac1024 = primary_config(plain, prep, kAttackIters);
    const auto attack_traces = run_primary(plain, prep, ac1024);
    const double attack_s = seconds_since(t0);
    std::size_t succ = 0;
    for (const AttackTrace& t : attack_traces) succ += t.success ? 1 : 0;
    report(2, succ == prep.attacked.size() && prep.attacked.size() == 150 && attack_s < kAttackSeconds,
           std::to_string(succ) + "/" + std::to_string(prep.attacked.size()) + " successful at k=1024, " +
               fmt("%.2f", attack_s) + " s (< 300 s)");

    // 3-5 from the full grid run; the second run feeds criterion 9.
    const fs::path dir_a = fresh_dir("a");
    ExperimentConfig cfg_a = cfg;
    cfg_a.out = dir_a;
    t0 = std::chrono::steady_clock::now();
    const auto rows = run_fig4(cfg_a);
    const double fig4_s = seconds_since(t0);

    int inversions = 0;
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double drop = rows[i - 1].auroc - rows[i].auroc;
        if (drop > 0.0) {
            ++inversions;
            worst = std::max(worst, drop);
        }
    }
    std::string curve;
    for (const Fig4Row& r : rows) curve += " k=" + std::to_string(r.k) + ":" + fmt("%.4f", r.auroc);
    const double final_auroc = rows.back().auroc;
    report(3, inversions <= 1 && worst <= kMaxInversion && final_auroc >= kFinalAuroc && fig4_s < kFig4Seconds,
           "AUROC" + curve + "; inversions " + std::to_string(inversions) + " (max drop " +
               fmt("%.4f", worst) + "), grid time " + fmt("%.1f", fig4_s) + " s");

    // Full per-k detail at 2048 for criteria 4 and 6.
    const KRun run2048 = run_k(cfg, prep, 2048);
    std::size_t near = 0, near_back = 0;
    for (const CounterRecord& r : run2048.detection.attacked) {
        const Vec x = run2048.primaries[r.id].final_point;
        if (poly::distance_to_boundary(*prep.regions, poly::P2{x[0], x[1]}) > kNearBoundary) continue;
        ++near;
        near_back += r.stopped && r.returned ? 1 : 0;
    }
    const double rr = rows.back().return_rate;
    report(4, rr >= kMinReturnRate && near == near_back && near > 0,
           "return rate " + fmt("%.4f", rr) + " at k=2048; two-class guaranteed return " +
               std::to_string(near_back) + "/" + std::to_string(near) + " near-boundary primaries");

    // 5. Containment among eligible points, pooled over the grid.
    std::size_t eligible = 0, contained = 0;
    for (int k : cfg.grid) {
        const auto lines = io::split_lines(io::read_file(dir_a / ("theorem_k" + std::to_string(k) + ".csv")));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const auto f = io::split_csv_line(lines[i]);
            if (f.at(4) != "1") continue;
            ++eligible;
            contained += f.at(5) == "1" ? 1 : 0;
        }
    }
    report(5, eligible > 0 && contained == eligible,
           std::to_string(contained) + "/" + std::to_string(eligible) +
               " eligible theorem-mode counter traces stay in B(x*,3eps)");

    // 6. Final iterates near the region-map decision boundary.
    std::size_t ok6 = 0, near6 = 0;
    double max_d = 0.0;
    for (const AttackTrace& t : run2048.primaries) {
        if (!t.success) continue;
        ++ok6;
        const double d = poly::distance_to_boundary(*prep.regions, poly::P2{t.final_point[0], t.final_point[1]});
        max_d = std::max(max_d, d);
        near6 += d <= kNearBoundary ? 1 : 0;
    }
    report(6, ok6 > 0 && static_cast<double>(near6) >= kBoundaryShare * static_cast<double>(ok6),
           std::to_string(near6) + "/" + std::to_string(ok6) + " within 1e-2 of the boundary (max " +
               fmt("%.2e", max_d) + ")");

    // 7. Oracle equivalences.
    t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    bool auroc_ok = true, trap_ok = true;
    std::uniform_int_distribution<std::size_t> size(1, 60);
    for (int i = 0; i < 200; ++i) {
        const auto y = random_ints(rng, size(rng), 1 + i % 20);
        const auto z = random_ints(rng, size(rng), 1 + i % 13);
        const double a = eval::auroc(y, z);
        auroc_ok = auroc_ok && a == pair_count(y, z);
        trap_ok = trap_ok && std::abs(eval::trapezoid_area(eval::roc_curve(y, z)) - a) <= kTrapezoidTol;
    }
    bool grad_ok = true;
    std::uniform_real_distribution<double> unit(0.0, 1.0), sgn(-1.0, 1.0);
    for (int checked = 0; checked < 100;) {
        const Vec x{unit(rng), unit(rng)};
        if (!far_from_kinks(prep.model, x)) continue;
        const Vec seed{sgn(rng), sgn(rng)};
        const Vec g = input_gradient(prep.model, x, seed);
        const Vec fd = fd_gradient(prep.model, x, seed);
        const double err = std::hypot(g[0] - fd[0], g[1] - fd[1]);
        grad_ok = grad_ok && err <= kGradRelTol * std::max(1.0, std::hypot(fd[0], fd[1]));
        ++checked;
    }
    bool affine_ok = true;
    for (const poly::Cell& c : prep.regions->cells) {
        std::vector<poly::P2> probes{c.centroid};
        for (const poly::P2& v : c.vertices) {
            probes.push_back({0.5 * (v[0] + c.centroid[0]), 0.5 * (v[1] + c.centroid[1])});
        }
        for (const poly::P2& q : probes) {
            const Vec z = forward_logits(prep.model, Vec{q[0], q[1]});
            const Vec za = c.logits(q);
            for (std::size_t j = 0; j < z.size(); ++j) affine_ok = affine_ok && std::abs(z[j] - za[j]) <= kAffineTol;
        }
    }
    bool proj_ok = true;
    std::normal_distribution<double> wide(0.5, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const Vec x{wide(rng), wide(rng), wide(rng)};
        const Vec p = project_box(x);
        proj_ok = proj_ok && project_box(p) == p;
        for (double v : p) proj_ok = proj_ok && v >= 0.0 && v <= 1.0;
    }
    const eval::Metrics pub = eval::metrics_from_counts({4803, 197, 4809, 191});
    const bool counts_ok = std::abs(pub.accuracy - 0.9612) <= kPublishedTol &&
                           std::abs(pub.recall - 0.9606) <= kPublishedTol &&
                           std::abs(pub.precision - 0.9617) <= kPublishedTol &&
                           pub.accuracy == 9612.0 / 10000.0 && pub.recall == 4803.0 / 5000.0 &&
                           pub.precision == 4803.0 / 4994.0;
    const double oracle_s = seconds_since(t0);
    report(7, auroc_ok && trap_ok && grad_ok && affine_ok && proj_ok && counts_ok && oracle_s < kOracleSeconds,
           std::string("auroc=pair-count ") + (auroc_ok ? "ok" : "BAD") + ", trapezoid " +
               (trap_ok ? "ok" : "BAD") + ", gradients " + (grad_ok ? "ok" : "BAD") + ", affine maps " +
               (affine_ok ? "ok" : "BAD") + ", projection " + (proj_ok ? "ok" : "BAD") + ", published-count metrics " +
               (counts_ok ? "ok" : "BAD") + ", " + fmt("%.2f", oracle_s) + " s");

    // 8. Targeted smoke test on three blobs.
    std::printf("NOTE criterion 8: not reproducible at desk scale: CIFAR10/ImageNet AUROC values "
                "(e.g. 99.73%%), the published detection thresholds as measured quantities, and the "
                "targeted-CIFAR return rate 73.32%%. Substituted by criteria 3-7 and the smoke test below.\n");
    ExperimentConfig blobs = cfg;
    blobs.data = DataSpec{"blobs", 600, 60, 0.06, 3, 2};
    const Prepared bprep = prepare(blobs);
    ExperimentConfig targeted = blobs;
    targeted.targeted = true;
    const KRun tb = run_k(targeted, bprep, 2048);
    const KRun ub = run_k(blobs, bprep, 2048);
    std::size_t hit = 0;
    for (const AttackTrace& t : tb.primaries) {
        hit += t.success && t.last_feasible_class == t.class_before % 3 + 1 ? 1 : 0;
    }
    report(8, hit == bprep.attacked.size() && tb.row.auroc >= ub.row.auroc - kTargetedAurocSlack,
           "targeted hits " + std::to_string(hit) + "/" + std::to_string(bprep.attacked.size()) +
               ", AUROC targeted " + fmt("%.4f", tb.row.auroc) + " vs untargeted " + fmt("%.4f", ub.row.auroc));

    // 9. Rerun with identical seeds: byte-identical files.
    const fs::path dir_b = fresh_dir("b");
    ExperimentConfig cfg_b = cfg;
    cfg_b.out = dir_b;
    run_fig4(cfg_b);
    std::size_t compared = 0, same = 0;
    for (const auto& e : fs::directory_iterator(dir_a)) {
        ++compared;
        same += files_equal(e.path(), dir_b / e.path().filename()) ? 1 : 0;
    }
    const std::size_t files_b = static_cast<std::size_t>(
        std::distance(fs::directory_iterator(dir_b), fs::directory_iterator{}));
    const Prepared prep2 = prepare(cfg);
    const bool attack_same = traces_csv(run_primary(plain, prep2, ac1024)) == traces_csv(attack_traces);
    const bool model_same = model_to_json(prep2.model) == model_to_json(trained);
    report(9, compared > 0 && same == compared && files_b == compared && attack_same && model_same,
           std::to_string(same) + "/" + std::to_string(compared) + " experiment files identical, k=1024 traces " +
               (attack_same ? "identical" : "DIFFER") + ", model " + (model_same ? "identical" : "DIFFERS"));

    std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
