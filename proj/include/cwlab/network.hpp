#pragma once

// Dense ReLU feed-forward classifier with linear output (the logits Z).
//
// Class indices follow the convention of the attack code: classes are
// numbered 1..c, and class 0 marks an exact tie of the largest logits
// (a point on a decision boundary).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cwlab/dataset.hpp"

namespace cwlab {

struct DenseLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Vec weight;  // row-major [out_dim x in_dim]
    Vec bias;    // [out_dim]

    double& w(std::size_t r, std::size_t c) { return weight[r * in_dim + c]; }
    double w(std::size_t r, std::size_t c) const { return weight[r * in_dim + c]; }
};

/// ReLU on every layer but the last; the last layer yields logits.
struct MlpModel {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const noexcept { return layers.empty() ? 0 : layers.front().in_dim; }
    std::size_t num_classes() const noexcept { return layers.empty() ? 0 : layers.back().out_dim; }
    std::size_t depth() const noexcept { return layers.size(); }

    /// Shapes chain, c >= 2, n >= 1, all parameters finite.
    void validate() const;
};

/// Zero-initialised model with the given layer widths.
MlpModel make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t classes);

/// He-uniform weights, small uniform biases; first-layer hyperplanes pass
/// through random points of the unit box. Deterministic per seed.
void init_weights(MlpModel& model, std::uint64_t seed);

Vec forward_logits(const MlpModel& model, std::span<const double> x);

/// Pre-activations of every hidden layer, outermost vector indexed by layer.
std::vector<Vec> hidden_preactivations(const MlpModel& model, std::span<const double> x);

Vec softmax(std::span<const double> logits);

/// Strict argmax as a 1-based class; 0 on an exact tie of the maximum.
int classify_logits(std::span<const double> logits);
int classify(const MlpModel& model, std::span<const double> x);

/// Gradient of seed^T Z(x) with respect to x. At ReLU kinks the subgradient
/// selection relu'(0) = 0 is used.
Vec input_gradient(const MlpModel& model, std::span<const double> x,
                   std::span<const double> seed);

struct TrainConfig {
    int epochs = 200;
    std::size_t batch_size = 16;
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Mini-batch SGD with momentum on softmax cross-entropy.
MlpModel train(MlpModel model, const LabeledDataset& data, const TrainConfig& cfg);

/// Mean softmax cross-entropy over the dataset.
double cross_entropy(const MlpModel& model, const LabeledDataset& data);

/// Fraction of samples whose classify() equals the label; ties count as errors.
double accuracy(const MlpModel& model, const LabeledDataset& data);

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace cwlab
