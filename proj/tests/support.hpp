#pragma once

#include <random>

#include "cwlab/experiment.hpp"

namespace cwlab::test {

/// Default two-moons pipeline, trained once per test binary.
inline const Prepared& moons() {
    static const Prepared p = prepare(default_experiment_config());
    return p;
}

inline Vec uniform_point(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec x(n);
    for (double& v : x) v = u(rng);
    return x;
}

/// Two-class linear model Z(x) = W x + b written as a network with one
/// identity-like hidden layer: h = relu(x) = x on the box, so Z = W h + b.
inline MlpModel linear_model(const Vec& w1, double b1, const Vec& w2, double b2) {
    const std::size_t n = w1.size();
    const std::size_t hidden[] = {n};
    MlpModel m = make_mlp(n, hidden, 2);
    for (std::size_t i = 0; i < n; ++i) m.layers[0].w(i, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        m.layers[1].w(0, i) = w1[i];
        m.layers[1].w(1, i) = w2[i];
    }
    m.layers[1].bias = {b1, b2};
    return m;
}

}  // namespace cwlab::test
