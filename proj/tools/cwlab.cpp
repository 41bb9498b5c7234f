// cwlab command-line driver.
//
//   cwlab train      --out DIR                       model.json, train.csv, test.csv
//   cwlab attack     --model M --data D --out DIR    traces.csv, adversarial.csv
//   cwlab counter    --model M --clean D --attacked A --out DIR   stats.csv
//   cwlab detect     --stats S --out DIR             report.json
//   cwlab polytope   --model M --out DIR             region.json
//   cwlab experiment fig4 --out DIR                  fig4.csv and per-k files
//
// Every subcommand accepts --config FILE (one JSON document, same schema as
// the experiment config), --seed and --workers; flags win over the config.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cwlab/experiment.hpp"
#include "cwlab/io.hpp"

namespace fs = std::filesystem;
using namespace cwlab;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "random seed");
    app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "output directory");
}

ExperimentConfig load_config(const Common& c, bool out_required) {
    ExperimentConfig cfg = default_experiment_config();
    bool config_has_out = false;
    if (!c.config.empty()) {
        const std::string text = io::read_file(c.config);
        cfg = experiment_config_from_json(text);
        config_has_out = nlohmann::json::parse(text).contains("out");
    }
    if (c.seed) cfg.seed = *c.seed;
    if (c.workers) cfg.workers = *c.workers;
    if (!c.out.empty()) {
        cfg.out = c.out;
    } else if (out_required && !config_has_out) {
        throw CLI::RequiredError("--out");
    }
    cfg.validate();
    return cfg;
}

std::string adversarial_csv(std::span<const AttackTrace> traces, std::size_t dim) {
    // Successful attacks only; label holds the original class.
    std::string s;
    for (std::size_t k = 0; k < dim; ++k) s += "x" + std::to_string(k) + ",";
    s += "label\n";
    for (const AttackTrace& t : traces) {
        if (!t.success) continue;
        for (double v : t.adversarial()) s += io::format_double(v) + ",";
        s += std::to_string(t.class_before) + "\n";
    }
    return s;
}

void cmd_train(const ExperimentConfig& cfg) {
    const auto [train, test] = split_head(make_dataset(cfg), cfg.data.n_train);
    const MlpModel model = train_model(cfg, train);
    fs::create_directories(cfg.out);
    save_model(model, cfg.out / "model.json");
    save_dataset(train, cfg.out / "train.csv");
    save_dataset(test, cfg.out / "test.csv");
    std::printf("test accuracy %.4f\n", accuracy(model, test));
}

void cmd_attack(const ExperimentConfig& cfg, const std::string& model_path,
                const std::string& data_path, bool jsonl) {
    Prepared prep;
    prep.model = load_model(model_path);
    prep.attacked = load_dataset(data_path, prep.model.num_classes());
    AttackConfig ac = cfg.attack;
    ac.trace_iterates = false;
    const auto traces = run_primary(cfg, prep, ac);
    fs::create_directories(cfg.out);
    io::write_file_atomic(cfg.out / "traces.csv", traces_csv(traces));
    io::write_file_atomic(cfg.out / "adversarial.csv",
                          adversarial_csv(traces, prep.model.input_dim()));
    if (jsonl) {
        // Per-iteration records need a second, traced run at the chosen weight.
        std::string all;
        for (const AttackTrace& t : traces) {
            if (t.class_before == 0) continue;
            AttackConfig one = ac;
            one.search.reset();
            one.penalty = t.penalty_weight;
            one.trace_iterates = true;
            if (cfg.targeted) {
                one.target = t.class_before % static_cast<int>(prep.model.num_classes()) + 1;
            }
            all += iteration_jsonl(cw_attack(prep.model, t.origin, one));
        }
        io::write_file_atomic(cfg.out / "iterations.jsonl", all);
    }
    std::size_t ok = 0;
    for (const AttackTrace& t : traces) ok += t.success ? 1 : 0;
    std::printf("success %zu/%zu\n", ok, traces.size());
}

void cmd_counter(const ExperimentConfig& cfg, const std::string& model_path,
                 const std::string& clean_path, const std::string& attacked_path) {
    const MlpModel model = load_model(model_path);
    const LabeledDataset clean = load_dataset(clean_path, model.num_classes());
    const LabeledDataset adv = load_dataset(attacked_path, model.num_classes());
    std::vector<AttackTrace> traces(adv.size());
    for (std::size_t i = 0; i < adv.size(); ++i) {
        AttackTrace& t = traces[i];
        t.origin = adv.points[i];
        t.final_point = adv.points[i];
        t.closest_point = adv.points[i];
        t.class_before = adv.labels[i];
        t.class_after = classify(model, adv.points[i]);
        t.success = true;
    }
    const DetectionResult det = detection_run(model, clean, traces, cfg.counter, cfg.workers);
    fs::create_directories(cfg.out);
    io::write_file_atomic(cfg.out / "stats.csv", detection_csv(det));
    std::printf("clean %zu (unstopped %zu), attacked %zu (unstopped %zu), return rate %.4f\n",
                det.clean.size(), det.unstopped_clean, det.attacked.size(),
                det.unstopped_attacked, return_rate(det.attacked));
}

void cmd_detect(const ExperimentConfig& cfg, const std::string& stats_path) {
    const std::string text = io::read_file(stats_path);
    const auto lines = io::split_lines(text);
    if (lines.empty() || lines[0] != "id,cohort,D,jstar,stopped,returned") {
        throw std::runtime_error("stats file has an unexpected header");
    }
    std::vector<double> attacked;
    std::vector<double> clean;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = io::split_csv_line(lines[i]);
        if (f.size() != 6) throw std::runtime_error("stats row " + std::to_string(i) + " is malformed");
        if (f[4] != "1") continue;  // not stopped: excluded
        const double d = io::parse_double(f[2]);
        if (f[1] == "attacked") {
            attacked.push_back(d);
        } else if (f[1] == "clean") {
            clean.push_back(d);
        } else {
            throw std::runtime_error("unknown cohort in stats row " + std::to_string(i));
        }
    }
    const eval::RocReport report = eval::make_report(attacked, clean);
    fs::create_directories(cfg.out);
    io::write_file_atomic(cfg.out / "report.json", eval::report_json(report));
    std::printf("auroc %.6f\n", report.auroc);
}

void cmd_polytope(const ExperimentConfig& cfg, const std::string& model_path) {
    const MlpModel model = load_model(model_path);
    const poly::PolytopeMap pmap = poly::enumerate_regions(model);
    fs::create_directories(cfg.out);
    io::write_file_atomic(cfg.out / "region.json", poly::region_json(pmap));
    std::printf("cells %zu boundary segments %zu c %s C %s\n", pmap.cells.size(),
                pmap.boundary.size(), io::format_double(pmap.grad_min).c_str(),
                io::format_double(pmap.grad_max).c_str());
}

void cmd_experiment(const ExperimentConfig& cfg, const std::string& name) {
    if (name != "fig4") throw std::runtime_error("unknown experiment '" + name + "'");
    for (const Fig4Row& r : run_fig4(cfg)) {
        std::printf("k=%d auroc=%.6f return_rate=%.4f eligible=%.4f theorem2=%.4f\n", r.k,
                    r.auroc, r.return_rate, r.eligible_fraction, r.theorem2_pass_rate);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carlini-Wagner attack and counter-attack detection lab"};
    app.require_subcommand(1);

    Common c_train, c_attack, c_counter, c_detect, c_poly, c_exp;
    auto* train = app.add_subcommand("train", "generate data and train the classifier");
    add_common(train, c_train);

    std::string model_path, data_path, clean_path, attacked_path, stats_path;
    bool jsonl = false;
    auto* attack = app.add_subcommand("attack", "CW attack on every point of a dataset");
    add_common(attack, c_attack);
    attack->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    attack->add_option("--data", data_path)->required()->check(CLI::ExistingFile);
    attack->add_flag("--iterations", jsonl, "also write per-iteration JSON lines");

    auto* counter = app.add_subcommand("counter", "counter attacks on clean and attacked points");
    add_common(counter, c_counter);
    counter->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    counter->add_option("--clean", clean_path)->required()->check(CLI::ExistingFile);
    counter->add_option("--attacked", attacked_path)->required()->check(CLI::ExistingFile);

    auto* detect = app.add_subcommand("detect", "ROC report from detection statistics");
    add_common(detect, c_detect);
    detect->add_option("--stats", stats_path)->required()->check(CLI::ExistingFile);

    auto* polytope = app.add_subcommand("polytope", "linear regions of a 2D one-hidden-layer model");
    add_common(polytope, c_poly);
    polytope->add_option("--model", model_path)->required()->check(CLI::ExistingFile);

    std::string exp_name = "fig4";
    auto* experiment = app.add_subcommand("experiment", "batch experiment");
    add_common(experiment, c_exp);
    experiment->add_option("name", exp_name, "experiment name (fig4)");

    try {
        app.parse(argc, argv);
        if (*train) cmd_train(load_config(c_train, true));
        if (*attack) cmd_attack(load_config(c_attack, true), model_path, data_path, jsonl);
        if (*counter) cmd_counter(load_config(c_counter, true), model_path, clean_path, attacked_path);
        if (*detect) cmd_detect(load_config(c_detect, true), stats_path);
        if (*polytope) cmd_polytope(load_config(c_poly, true), model_path);
        if (*experiment) cmd_experiment(load_config(c_exp, true), exp_name);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
