#include "cwlab/experiment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "cwlab/io.hpp"
#include "cwlab/parallel.hpp"

namespace cwlab {

namespace {

using json = nlohmann::ordered_json;

// Sub-seeds derived from the top-level seed.
std::uint64_t data_seed(const ExperimentConfig& c) { return c.seed; }
std::uint64_t split_seed(const ExperimentConfig& c) { return c.seed + 1; }
std::uint64_t init_seed(const ExperimentConfig& c) { return c.seed + 2; }
std::uint64_t train_seed(const ExperimentConfig& c) { return c.seed + 3; }

inline constexpr double kGeometryPenaltyCap = 100.0;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    return io::format_double(v);
}

PenaltySearch search_from_json(const json& j, PenaltySearch s) {
    s.lo = j.value("lo", s.lo);
    s.hi = j.value("hi", s.hi);
    s.steps = j.value("steps", s.steps);
    return s;
}

json search_to_json(const PenaltySearch& s) {
    return {{"lo", s.lo}, {"hi", s.hi}, {"steps", s.steps}};
}

}  // namespace

void ExperimentConfig::validate() const {
    if (data.kind != "moons" && data.kind != "blobs") {
        throw std::invalid_argument("data.kind must be moons or blobs");
    }
    if (data.n_test < 2) throw std::invalid_argument("data.n_test must be >= 2");
    if (data.n_train < 1) throw std::invalid_argument("data.n_train must be >= 1");
    if (model.restarts < 1) throw std::invalid_argument("model.restarts must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    model.train.validate();
    attack.validate();
    counter.validate();
    if (grid.empty()) throw std::invalid_argument("iteration grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1) throw std::invalid_argument("iteration grid entries must be >= 1");
        if (i > 0 && grid[i] <= grid[i - 1]) {
            throw std::invalid_argument("iteration grid must be strictly increasing");
        }
    }
}

ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.attack.search = PenaltySearch{};
    return cfg;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg = default_experiment_config();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("grid")) cfg.grid = j["grid"].get<std::vector<int>>();
    cfg.geometry = j.value("geometry", cfg.geometry);
    cfg.targeted = j.value("targeted", cfg.targeted);

    if (j.contains("data")) {
        const json& d = j["data"];
        cfg.data.kind = d.value("kind", cfg.data.kind);
        cfg.data.n_train = d.value("n_train", cfg.data.n_train);
        cfg.data.n_test = d.value("n_test", cfg.data.n_test);
        cfg.data.noise = d.value("noise", cfg.data.noise);
        cfg.data.classes = d.value("classes", cfg.data.classes);
        cfg.data.dim = d.value("dim", cfg.data.dim);
    }
    if (j.contains("model")) {
        const json& m = j["model"];
        if (m.contains("hidden")) cfg.model.hidden = m["hidden"].get<std::vector<std::size_t>>();
        TrainConfig& t = cfg.model.train;
        t.epochs = m.value("epochs", t.epochs);
        t.batch_size = m.value("batch_size", t.batch_size);
        t.learning_rate = m.value("learning_rate", t.learning_rate);
        t.momentum = m.value("momentum", t.momentum);
        cfg.model.restarts = m.value("restarts", cfg.model.restarts);
    }
    if (j.contains("attack")) {
        const json& a = j["attack"];
        AttackConfig& ac = cfg.attack;
        if (a.contains("norm")) ac.norm = norm_from_string(a["norm"].get<std::string>());
        ac.confidence = a.value("confidence", ac.confidence);
        ac.max_iters = a.value("max_iters", ac.max_iters);
        ac.alpha0 = a.value("alpha0", ac.alpha0);
        ac.n0 = a.value("n0", ac.n0);
        ac.penalty = a.value("penalty", ac.penalty);
        if (a.contains("search")) {
            if (a["search"].is_null()) {
                ac.search.reset();
            } else {
                ac.search = search_from_json(a["search"], ac.search.value_or(PenaltySearch{}));
            }
        }
    }
    if (j.contains("counter")) {
        const json& c = j["counter"];
        CounterConfig& cc = cfg.counter;
        if (c.contains("norm")) cc.norm = norm_from_string(c["norm"].get<std::string>());
        cc.j_max = c.value("j_max", cc.j_max);
        cc.alpha0 = c.value("alpha0", cc.alpha0);
        cc.n0 = c.value("n0", cc.n0);
        cc.confidence = c.value("confidence", cc.confidence);
        if (c.contains("search")) cc.b_search = search_from_json(c["search"], cc.b_search);
    }
    return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["out"] = cfg.out.string();
    j["grid"] = cfg.grid;
    j["geometry"] = cfg.geometry;
    j["targeted"] = cfg.targeted;
    j["data"] = {{"kind", cfg.data.kind},   {"n_train", cfg.data.n_train},
                 {"n_test", cfg.data.n_test}, {"noise", cfg.data.noise},
                 {"classes", cfg.data.classes}, {"dim", cfg.data.dim}};
    const TrainConfig& t = cfg.model.train;
    j["model"] = {{"hidden", cfg.model.hidden},
                  {"epochs", t.epochs},
                  {"batch_size", t.batch_size},
                  {"learning_rate", t.learning_rate},
                  {"momentum", t.momentum},
                  {"restarts", cfg.model.restarts}};
    const AttackConfig& a = cfg.attack;
    j["attack"] = {{"norm", to_string(a.norm)}, {"confidence", a.confidence},
                   {"max_iters", a.max_iters},  {"alpha0", a.alpha0},
                   {"n0", a.n0},                {"penalty", a.penalty}};
    j["attack"]["search"] = a.search ? search_to_json(*a.search) : json(nullptr);
    const CounterConfig& c = cfg.counter;
    j["counter"] = {{"norm", to_string(c.norm)}, {"j_max", c.j_max},
                    {"alpha0", c.alpha0},        {"n0", c.n0},
                    {"confidence", c.confidence}, {"search", search_to_json(c.b_search)}};
    return j.dump(2) + "\n";
}

LabeledDataset make_dataset(const ExperimentConfig& cfg) {
    const std::size_t n = cfg.data.n_train + cfg.data.n_test;
    if (cfg.data.kind == "moons") return two_moons(n, cfg.data.noise, data_seed(cfg));
    return blobs(n, cfg.data.classes, cfg.data.dim, cfg.data.noise, data_seed(cfg));
}

MlpModel train_model(const ExperimentConfig& cfg, const LabeledDataset& train) {
    MlpModel best;
    double best_loss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.model.restarts; ++r) {
        const auto offset = 4 * static_cast<std::uint64_t>(r);
        MlpModel model = make_mlp(train.dim, cfg.model.hidden, train.classes);
        init_weights(model, init_seed(cfg) + offset);
        TrainConfig tc = cfg.model.train;
        tc.seed = train_seed(cfg) + offset;
        model = cwlab::train(std::move(model), train, tc);
        const double loss = cross_entropy(model, train);
        if (loss < best_loss) {
            best_loss = loss;
            best = std::move(model);
        }
    }
    return best;
}

Prepared prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    Prepared p;
    auto [train, test] = split_head(make_dataset(cfg), cfg.data.n_train);
    p.train = std::move(train);
    p.test = std::move(test);
    auto [clean, attacked] = split_half(p.test, split_seed(cfg));
    p.clean = std::move(clean);
    p.attacked = std::move(attacked);
    p.model = train_model(cfg, p.train);
    p.test_accuracy = accuracy(p.model, p.test);
    if (p.model.depth() == 2 && p.model.input_dim() == 2 && cfg.model.hidden[0] <= 64) {
        p.regions = poly::enumerate_regions(p.model);
        p.bounds = poly::boundary_gradient_bounds(*p.regions);
    }
    return p;
}

AttackConfig primary_config(const ExperimentConfig& cfg, const Prepared& prep, int k) {
    AttackConfig ac = cfg.attack;
    ac.max_iters = k;
    ac.stop = StopMode::Theory;
    if (cfg.geometry && prep.bounds.has_boundary && prep.bounds.c > 0.0) {
        const double lo = penalty_lower_bound(prep.model.input_dim(), prep.bounds.c);
        PenaltySearch s = ac.search.value_or(PenaltySearch{});
        s.lo = lo;
        // The cap only applies while it sits above the lower bound.
        s.hi = lo < kGeometryPenaltyCap ? kGeometryPenaltyCap : 10.0 * lo;
        ac.search = s;
    }
    return ac;
}

std::vector<AttackTrace> run_primary(const ExperimentConfig& cfg, const Prepared& prep,
                                     const AttackConfig& attack) {
    const LabeledDataset& data = prep.attacked;
    std::vector<AttackTrace> traces(data.size());
    const auto classes = static_cast<int>(prep.model.num_classes());
    parallel_for(data.size(), cfg.workers, [&](std::size_t i) {
        const Vec& x0 = data.points[i];
        const int before = classify(prep.model, x0);
        if (before == 0) {
            // Already on a boundary: nothing to attack; recorded as a failure.
            AttackTrace t;
            t.origin = x0;
            t.final_point = x0;
            t.closest_point = x0;
            t.norm = attack.norm;
            traces[i] = std::move(t);
            return;
        }
        AttackConfig ac = attack;
        if (cfg.targeted) ac.target = before % classes + 1;
        traces[i] = ac.search ? binary_search_penalty(prep.model, x0, ac).trace
                              : cw_attack(prep.model, x0, ac);
    });
    return traces;
}

std::vector<TheoremRecord> theorem_check(const ExperimentConfig& cfg, const Prepared& prep,
                                         std::span<const AttackTrace> primaries) {
    std::vector<TheoremRecord> recs(primaries.size());
    if (!prep.regions || !prep.bounds.has_boundary) return {};
    const poly::PolytopeMap& pmap = *prep.regions;
    const double c = prep.bounds.c;
    const double C = prep.bounds.C;
    parallel_for(primaries.size(), cfg.workers, [&](std::size_t i) {
        TheoremRecord& r = recs[i];
        r.id = i;
        const AttackTrace& tr = primaries[i];
        if (!tr.success) return;
        const Vec& xk = tr.adversarial();
        const poly::P2 x0{tr.origin[0], tr.origin[1]};
        const poly::P2 pk{xk[0], xk[1]};
        auto cert = poly::stationary_point_near(pmap, prep.model, x0, tr.penalty_weight, pk);
        if (!cert) cert = poly::stationary_point_grid(pmap, prep.model, x0, tr.penalty_weight, pk);
        if (!cert) return;
        r.has_star = true;
        r.x_star = cert->point;
        r.eps = epsilon_for_point(xk, cert->point);
        r.eligible = poly::ball_eligibility(pmap, r.x_star, r.eps);
        if (!r.eligible) return;
        const CounterParams params = counter_params(c, C, r.eps);
        CounterConfig cc = cfg.counter;
        cc.mode = CounterMode::Theorem;
        cc.norm = Norm::L2;
        cc.b = params.b;
        cc.step = params.alpha;
        cc.trace_iterates = true;
        const CounterRecord rec = counter_attack(prep.model, xk, cc, tr.class_before);
        r.b = params.b;
        r.alpha = params.alpha;
        r.jstar = rec.jstar;
        r.contained = poly::verify_theorem2(rec.iterates, r.x_star, r.eps);
    });
    std::vector<TheoremRecord> out;
    for (TheoremRecord& r : recs) {
        if (primaries[r.id].success) out.push_back(r);
    }
    return out;
}

KRun run_k(const ExperimentConfig& cfg, const Prepared& prep, int k) {
    KRun run;
    run.row.k = k;
    run.primaries = run_primary(cfg, prep, primary_config(cfg, prep, k));
    run.detection = detection_run(prep.model, prep.clean, run.primaries, cfg.counter, cfg.workers);
    const DetectionResult& det = run.detection;
    if (!det.attacked_stats.empty() && !det.clean_stats.empty()) {
        run.report = eval::make_report(det.attacked_stats, det.clean_stats);
        run.row.auroc = run.report->auroc;
    } else {
        run.row.auroc = std::numeric_limits<double>::quiet_NaN();
    }
    run.row.return_rate = return_rate(det.attacked);

    run.theorem = theorem_check(cfg, prep, run.primaries);
    std::size_t eligible = 0;
    std::size_t contained = 0;
    for (const TheoremRecord& r : run.theorem) {
        if (!r.eligible) continue;
        ++eligible;
        if (r.contained) ++contained;
    }
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    run.row.eligible_fraction =
        run.theorem.empty() ? nan
                            : static_cast<double>(eligible) / static_cast<double>(run.theorem.size());
    run.row.theorem2_pass_rate =
        eligible == 0 ? nan : static_cast<double>(contained) / static_cast<double>(eligible);
    return run;
}

std::string traces_csv(std::span<const AttackTrace> traces) {
    std::string s = attack_csv_header();
    for (std::size_t i = 0; i < traces.size(); ++i) s += attack_csv_row(i, traces[i]);
    return s;
}

std::string detection_csv(const DetectionResult& det) {
    std::string s = stats_csv_header();
    for (const CounterRecord& r : det.clean) s += stats_csv_row(r, false);
    for (const CounterRecord& r : det.attacked) s += stats_csv_row(r, true);
    return s;
}

std::string theorem_csv(std::span<const TheoremRecord> recs) {
    std::string s = "id,x_star0,x_star1,eps,eligible,contained,b,alpha,jstar\n";
    for (const TheoremRecord& r : recs) {
        s += std::to_string(r.id) + ",";
        s += r.has_star ? fmt(r.x_star[0]) + "," + fmt(r.x_star[1]) + "," : "nan,nan,";
        s += fmt(r.eps) + ",";
        s += r.eligible ? "1," : "0,";
        s += r.contained ? "1," : "0,";
        s += fmt(r.b) + "," + fmt(r.alpha) + "," + std::to_string(r.jstar) + "\n";
    }
    return s;
}

std::string fig4_csv(std::span<const Fig4Row> rows) {
    std::string s = "k,auroc,return_rate,eligible_fraction,theorem2_pass_rate\n";
    for (const Fig4Row& r : rows) {
        s += std::to_string(r.k) + "," + fmt(r.auroc) + "," + fmt(r.return_rate) + "," +
             fmt(r.eligible_fraction) + "," + fmt(r.theorem2_pass_rate) + "\n";
    }
    return s;
}

std::vector<Fig4Row> run_fig4(const ExperimentConfig& cfg) {
    const Prepared prep = prepare(cfg);
    std::filesystem::create_directories(cfg.out);
    save_model(prep.model, cfg.out / "model.json");
    std::vector<Fig4Row> rows;
    for (int k : cfg.grid) {
        const KRun run = run_k(cfg, prep, k);
        const std::string tag = "_k" + std::to_string(k);
        io::write_file_atomic(cfg.out / ("traces" + tag + ".csv"), traces_csv(run.primaries));
        io::write_file_atomic(cfg.out / ("stats" + tag + ".csv"), detection_csv(run.detection));
        io::write_file_atomic(cfg.out / ("theorem" + tag + ".csv"), theorem_csv(run.theorem));
        if (run.report) {
            io::write_file_atomic(cfg.out / ("report" + tag + ".json"),
                                  eval::report_json(*run.report));
        }
        rows.push_back(run.row);
    }
    io::write_file_atomic(cfg.out / "fig4.csv", fig4_csv(rows));
    return rows;
}

}  // namespace cwlab
