#pragma once

// Two-moons pipeline: data, training, region analysis, primary attacks,
// counter attacks and evaluation, wired together from one JSON config.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cwlab/attack.hpp"
#include "cwlab/counterdetect.hpp"
#include "cwlab/datagen.hpp"
#include "cwlab/eval.hpp"
#include "cwlab/network.hpp"
#include "cwlab/polytope2d.hpp"

namespace cwlab {

struct DataSpec {
    std::string kind = "moons";  // moons | blobs
    std::size_t n_train = 2000;
    std::size_t n_test = 300;
    double noise = 0.1;          // moons noise sd, blobs spread
    std::size_t classes = 2;     // blobs only
    std::size_t dim = 2;         // blobs only
};

struct ModelSpec {
    std::vector<std::size_t> hidden{8};
    TrainConfig train;
    int restarts = 3;  // independent inits; lowest training loss wins
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    DataSpec data;
    ModelSpec model;
    AttackConfig attack;   // primary attack; search range replaced in geometry mode
    bool geometry = true;  // a in [2 sqrt(d)/c, 100] when the region map exists
    bool targeted = false; // primary target = class_before % classes + 1
    CounterConfig counter;
    std::vector<int> grid{8, 32, 128, 512, 2048};
    std::filesystem::path out = "out";

    void validate() const;
};

ExperimentConfig default_experiment_config();
/// Fields missing from the document keep their defaults.
ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

struct Prepared {
    LabeledDataset train;
    LabeledDataset test;
    LabeledDataset clean;     // first half of the test split
    LabeledDataset attacked;  // second half
    MlpModel model;
    double test_accuracy = 0.0;
    std::optional<poly::PolytopeMap> regions;  // one hidden layer, 2D input
    poly::GradientBounds bounds;
};

LabeledDataset make_dataset(const ExperimentConfig& cfg);
MlpModel train_model(const ExperimentConfig& cfg, const LabeledDataset& train);
Prepared prepare(const ExperimentConfig& cfg);

/// Primary attack configuration for k iterations: Theory stop mode and, in
/// geometry mode, the search range [2 sqrt(d)/c, 100].
AttackConfig primary_config(const ExperimentConfig& cfg, const Prepared& prep, int k);

std::vector<AttackTrace> run_primary(const ExperimentConfig& cfg, const Prepared& prep,
                                     const AttackConfig& attack);

struct TheoremRecord {
    std::size_t id = 0;
    bool has_star = false;
    poly::P2 x_star{};
    double eps = 0.0;
    bool eligible = false;
    bool contained = false;
    double b = 0.0;
    double alpha = 0.0;
    int jstar = -1;
};

/// Theorem-mode counter attacks from every successful primary attack with a
/// certified stationary point x* near its result.
std::vector<TheoremRecord> theorem_check(const ExperimentConfig& cfg, const Prepared& prep,
                                         std::span<const AttackTrace> primaries);

struct Fig4Row {
    int k = 0;
    double auroc = 0.0;
    double return_rate = 0.0;
    double eligible_fraction = 0.0;
    double theorem2_pass_rate = 0.0;  // NaN when no point is eligible
};

struct KRun {
    Fig4Row row;
    std::vector<AttackTrace> primaries;
    DetectionResult detection;
    std::optional<eval::RocReport> report;
    std::vector<TheoremRecord> theorem;
};

KRun run_k(const ExperimentConfig& cfg, const Prepared& prep, int k);

std::string traces_csv(std::span<const AttackTrace> traces);
std::string detection_csv(const DetectionResult& det);
std::string theorem_csv(std::span<const TheoremRecord> recs);
std::string fig4_csv(std::span<const Fig4Row> rows);

/// Writes model.json, fig4.csv and per-k traces/stats/report/theorem files
/// into cfg.out. Returns the rows.
std::vector<Fig4Row> run_fig4(const ExperimentConfig& cfg);

}  // namespace cwlab
