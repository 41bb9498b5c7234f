#include "cwlab/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "cwlab/io.hpp"
#include "cwlab/kernels.hpp"

namespace cwlab {

namespace {

void check_input(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim()) {
        throw std::invalid_argument("input has " + std::to_string(x.size()) +
                                    " entries, model expects " +
                                    std::to_string(model.input_dim()));
    }
}

void apply_layer(const DenseLayer& layer, std::span<const double> in, Vec& out) {
    out.resize(layer.out_dim);
    kernels::active().gemv(layer.weight.data(), layer.bias.data(), in.data(), out.data(),
                           layer.out_dim, layer.in_dim);
}

/// Forward pass that keeps every hidden pre-activation.
Vec forward_cached(const MlpModel& model, std::span<const double> x, std::vector<Vec>& pre) {
    pre.resize(model.depth() - 1);
    Vec act(x.begin(), x.end());
    Vec out;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        apply_layer(model.layers[l], act, out);
        if (l + 1 == model.depth()) break;
        pre[l] = out;
        for (double& v : out) v = v > 0.0 ? v : 0.0;
        act.swap(out);
    }
    return out;
}

/// Backpropagates dL/dZ through the cached pass. Returns dL/dx; when
/// layer_grads is non-null, also accumulates parameter gradients into it.
Vec backward(const MlpModel& model, std::span<const double> x, const std::vector<Vec>& pre,
             Vec delta, std::vector<DenseLayer>* layer_grads) {
    const auto& k = kernels::active();
    Vec below;
    for (std::size_t l = model.depth(); l-- > 0;) {
        const DenseLayer& layer = model.layers[l];
        if (layer_grads != nullptr) {
            DenseLayer& g = (*layer_grads)[l];
            for (std::size_t r = 0; r < layer.out_dim; ++r) {
                const double d = delta[r];
                g.bias[r] += d;
                if (d == 0.0) continue;
                for (std::size_t c = 0; c < layer.in_dim; ++c) {
                    const double in = l == 0 ? x[c] : std::max(pre[l - 1][c], 0.0);
                    g.weight[r * layer.in_dim + c] += d * in;
                }
            }
        }
        below.resize(layer.in_dim);
        k.gemv_t(layer.weight.data(), delta.data(), below.data(), layer.out_dim, layer.in_dim);
        if (l > 0) {
            const Vec& z = pre[l - 1];
            for (std::size_t c = 0; c < below.size(); ++c) {
                if (!(z[c] > 0.0)) below[c] = 0.0;
            }
        }
        delta.swap(below);
    }
    return delta;
}

}  // namespace

void MlpModel::validate() const {
    if (layers.empty()) throw std::invalid_argument("model has no layers");
    if (input_dim() < 1) throw std::invalid_argument("input dimension must be >= 1");
    if (num_classes() < 2) throw std::invalid_argument("model needs at least 2 classes");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const DenseLayer& layer = layers[l];
        if (layer.in_dim == 0 || layer.out_dim == 0) {
            throw std::invalid_argument("layer " + std::to_string(l) + " has a zero dimension");
        }
        if (layer.weight.size() != layer.in_dim * layer.out_dim ||
            layer.bias.size() != layer.out_dim) {
            throw std::invalid_argument("layer " + std::to_string(l) + " has inconsistent storage");
        }
        if (l > 0 && layers[l - 1].out_dim != layer.in_dim) {
            throw std::invalid_argument("layer " + std::to_string(l) +
                                        " input does not match previous output");
        }
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(layer.weight.begin(), layer.weight.end(), finite) ||
            !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
            throw std::invalid_argument("layer " + std::to_string(l) + " has non-finite parameters");
        }
    }
}

MlpModel make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                  std::size_t classes) {
    MlpModel m;
    std::size_t prev = input_dim;
    auto push = [&](std::size_t out) {
        DenseLayer layer;
        layer.in_dim = prev;
        layer.out_dim = out;
        layer.weight.assign(prev * out, 0.0);
        layer.bias.assign(out, 0.0);
        m.layers.push_back(std::move(layer));
        prev = out;
    };
    for (std::size_t h : hidden) push(h);
    push(classes);
    m.validate();
    return m;
}

void init_weights(MlpModel& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (DenseLayer& layer : model.layers) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in_dim));
        std::uniform_real_distribution<double> wdist(-limit, limit);
        std::uniform_real_distribution<double> bdist(-0.1, 0.1);
        for (double& w : layer.weight) w = wdist(rng);
        for (double& b : layer.bias) b = bdist(rng);
    }
    // Inputs live in the unit box: centre each first-layer hyperplane on a
    // random point of the box so every neuron starts out splitting the data.
    if (model.depth() > 1) {
        DenseLayer& first = model.layers.front();
        std::uniform_real_distribution<double> udist(0.0, 1.0);
        for (std::size_t r = 0; r < first.out_dim; ++r) {
            double b = 0.0;
            for (std::size_t c = 0; c < first.in_dim; ++c) b -= first.w(r, c) * udist(rng);
            first.bias[r] = b;
        }
    }
}

Vec forward_logits(const MlpModel& model, std::span<const double> x) {
    check_input(model, x);
    Vec act(x.begin(), x.end());
    Vec out;
    for (std::size_t l = 0; l < model.depth(); ++l) {
        apply_layer(model.layers[l], act, out);
        if (l + 1 < model.depth()) {
            for (double& v : out) v = v > 0.0 ? v : 0.0;
        }
        act.swap(out);
    }
    return act;
}

std::vector<Vec> hidden_preactivations(const MlpModel& model, std::span<const double> x) {
    check_input(model, x);
    std::vector<Vec> pre;
    forward_cached(model, x, pre);
    return pre;
}

Vec softmax(std::span<const double> logits) {
    if (logits.empty()) return {};
    const double m = *std::max_element(logits.begin(), logits.end());
    Vec p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

int classify_logits(std::span<const double> logits) {
    if (logits.empty()) return 0;
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) {
            best = i;
            tie = false;
        } else if (logits[i] == logits[best]) {
            tie = true;
        }
    }
    return tie ? 0 : static_cast<int>(best) + 1;
}

int classify(const MlpModel& model, std::span<const double> x) {
    return classify_logits(forward_logits(model, x));
}

Vec input_gradient(const MlpModel& model, std::span<const double> x,
                   std::span<const double> seed) {
    check_input(model, x);
    if (seed.size() != model.num_classes()) {
        throw std::invalid_argument("seed vector length must equal the number of classes");
    }
    std::vector<Vec> pre;
    forward_cached(model, x, pre);
    return backward(model, x, pre, Vec(seed.begin(), seed.end()), nullptr);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::invalid_argument("momentum must lie in [0, 1)");
    }
}

MlpModel train(MlpModel model, const LabeledDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    model.validate();
    if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
    if (data.dim != model.input_dim()) {
        throw std::invalid_argument("dataset dimension does not match the model input");
    }
    const std::size_t classes = model.num_classes();
    for (int label : data.labels) {
        if (label < 1 || static_cast<std::size_t>(label) > classes) {
            throw std::invalid_argument("label outside 1..classes");
        }
    }

    std::vector<DenseLayer> grads = model.layers;
    std::vector<DenseLayer> velocity = model.layers;
    auto zero = [](std::vector<DenseLayer>& ls) {
        for (DenseLayer& l : ls) {
            std::fill(l.weight.begin(), l.weight.end(), 0.0);
            std::fill(l.bias.begin(), l.bias.end(), 0.0);
        }
    };
    zero(velocity);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Vec> pre;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            zero(grads);
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t s = order[i];
                const Vec& x = data.points[s];
                Vec p = softmax(forward_cached(model, x, pre));
                p[static_cast<std::size_t>(data.labels[s] - 1)] -= 1.0;
                backward(model, x, pre, std::move(p), &grads);
            }
            const double scale = cfg.learning_rate / static_cast<double>(stop - start);
            for (std::size_t l = 0; l < model.depth(); ++l) {
                auto update = [&](Vec& param, Vec& vel, const Vec& g) {
                    for (std::size_t i = 0; i < param.size(); ++i) {
                        vel[i] = cfg.momentum * vel[i] - scale * g[i];
                        param[i] += vel[i];
                    }
                };
                update(model.layers[l].weight, velocity[l].weight, grads[l].weight);
                update(model.layers[l].bias, velocity[l].bias, grads[l].bias);
            }
        }
    }
    return model;
}

double cross_entropy(const MlpModel& model, const LabeledDataset& data) {
    if (data.empty()) throw std::invalid_argument("cross entropy of an empty dataset");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec z = forward_logits(model, data.points[i]);
        const double m = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - m);
        total += m + std::log(sum) - z[static_cast<std::size_t>(data.labels[i] - 1)];
    }
    return total / static_cast<double>(data.size());
}

double accuracy(const MlpModel& model, const LabeledDataset& data) {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (classify(model, data.points[i]) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::string model_to_json(const MlpModel& model) {
    nlohmann::ordered_json j;
    j["input_dim"] = model.input_dim();
    j["classes"] = model.num_classes();
    j["layers"] = nlohmann::ordered_json::array();
    for (const DenseLayer& layer : model.layers) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            rows.push_back(Vec(layer.weight.begin() + static_cast<std::ptrdiff_t>(r * layer.in_dim),
                               layer.weight.begin() +
                                   static_cast<std::ptrdiff_t>((r + 1) * layer.in_dim)));
        }
        nlohmann::ordered_json lj;
        lj["w"] = std::move(rows);
        lj["b"] = layer.bias;
        j["layers"].push_back(std::move(lj));
    }
    return j.dump(1) + "\n";
}

MlpModel model_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MlpModel m;
    for (const auto& lj : j.at("layers")) {
        DenseLayer layer;
        const auto& rows = lj.at("w");
        layer.out_dim = rows.size();
        layer.in_dim = layer.out_dim == 0 ? 0 : rows.at(0).size();
        for (const auto& row : rows) {
            if (row.size() != layer.in_dim) throw std::invalid_argument("ragged weight matrix");
            for (const auto& v : row) layer.weight.push_back(v.get<double>());
        }
        layer.bias = lj.at("b").get<Vec>();
        m.layers.push_back(std::move(layer));
    }
    m.validate();
    if (m.input_dim() != j.at("input_dim").get<std::size_t>() ||
        m.num_classes() != j.at("classes").get<std::size_t>()) {
        throw std::invalid_argument("model header disagrees with layer shapes");
    }
    return m;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
    io::write_file_atomic(path, model_to_json(model));
}

MlpModel load_model(const std::filesystem::path& path) {
    return model_from_json(io::read_file(path));
}

}  // namespace cwlab
