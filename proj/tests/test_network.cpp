#include <doctest.h>

#include <cmath>
#include <random>

#include "cwlab/network.hpp"
#include "support.hpp"

using namespace cwlab;

namespace {

// Central differences of seed^T Z; valid when no hidden unit changes sign
// inside the stencil.
Vec fd_gradient(const MlpModel& m, const Vec& x, const Vec& seed, double h) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec p = x, q = x;
        p[i] += h;
        q[i] -= h;
        const Vec zp = forward_logits(m, p);
        const Vec zq = forward_logits(m, q);
        double d = 0.0;
        for (std::size_t c = 0; c < seed.size(); ++c) d += seed[c] * (zp[c] - zq[c]);
        g[i] = d / (2.0 * h);
    }
    return g;
}

bool far_from_kinks(const MlpModel& m, const Vec& x, double margin) {
    for (const Vec& layer : hidden_preactivations(m, x)) {
        for (double z : layer) {
            if (std::abs(z) < margin) return false;
        }
    }
    return true;
}

MlpModel random_model(std::uint64_t seed, std::size_t in, std::vector<std::size_t> hidden,
                      std::size_t classes) {
    MlpModel m = make_mlp(in, hidden, classes);
    init_weights(m, seed);
    return m;
}

}  // namespace

TEST_CASE("classify_logits uses a strict 1-based argmax") {
    CHECK(classify_logits(Vec{2.0, 1.0}) == 1);
    CHECK(classify_logits(Vec{1.0, 2.0}) == 2);
    CHECK(classify_logits(Vec{1.0, 1.0}) == 0);
    CHECK(classify_logits(Vec{0.0, 3.0, 3.0}) == 0);
    CHECK(classify_logits(Vec{3.0, 3.0, 4.0}) == 3);
    CHECK(classify_logits(Vec{-1.0, -2.0, -3.0}) == 1);
}

TEST_CASE("softmax matches an extended precision oracle") {
    const Vec z{1.0, 2.0, 3.0};
    const Vec p = softmax(z);
    long double sum = 0.0L;
    for (double v : z) sum += std::exp(static_cast<long double>(v));
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto ref = static_cast<double>(std::exp(static_cast<long double>(z[i])) / sum);
        CHECK(p[i] == doctest::Approx(ref).epsilon(1e-15));
    }
    const Vec big = softmax(Vec{1000.0, 1000.0});
    CHECK(big[0] == doctest::Approx(0.5));
    CHECK(std::isfinite(big[1]));
}

TEST_CASE("forward pass of a hand-built network") {
    const std::size_t hidden[] = {2};
    MlpModel m = make_mlp(2, hidden, 2);
    m.layers[0].weight = {1.0, -1.0, 0.5, 0.5};
    m.layers[0].bias = {0.0, -0.5};
    m.layers[1].weight = {1.0, 2.0, -1.0, 1.0};
    m.layers[1].bias = {0.1, 0.2};
    // h = relu(0.3 - 0.2, 0.25 - 0.5) = (0.1, 0)
    const Vec z = forward_logits(m, Vec{0.3, 0.2});
    CHECK(z[0] == doctest::Approx(0.2));
    CHECK(z[1] == doctest::Approx(0.1));
    CHECK(classify(m, Vec{0.3, 0.2}) == 1);
    const auto pre = hidden_preactivations(m, Vec{0.3, 0.2});
    REQUIRE(pre.size() == 1);
    CHECK(pre[0][0] == doctest::Approx(0.1));
    CHECK(pre[0][1] == doctest::Approx(-0.25));
}

TEST_CASE("input gradients match finite differences away from kinks") {
    std::mt19937_64 rng(3);
    const MlpModel shallow = random_model(5, 2, {8}, 2);
    const MlpModel deep = random_model(6, 4, {7, 5}, 3);
    for (const MlpModel* m : {&shallow, &deep}) {
        int checked = 0;
        while (checked < 100) {
            const Vec x = test::uniform_point(rng, m->input_dim(), 0.05, 0.95);
            if (!far_from_kinks(*m, x, 1e-3)) continue;
            Vec seed = test::uniform_point(rng, m->num_classes(), -1.0, 1.0);
            const Vec g = input_gradient(*m, x, seed);
            const Vec fd = fd_gradient(*m, x, seed, 1e-6);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                num += (g[i] - fd[i]) * (g[i] - fd[i]);
                den += fd[i] * fd[i];
            }
            CHECK(std::sqrt(num) <= 1e-5 * std::max(1.0, std::sqrt(den)));
            ++checked;
        }
    }
}

TEST_CASE("gradient at a kink uses the zero selection") {
    const std::size_t hidden[] = {1};
    MlpModel m = make_mlp(1, hidden, 2);
    m.layers[0].weight = {1.0};
    m.layers[0].bias = {-0.5};
    m.layers[1].weight = {1.0, -1.0};
    m.layers[1].bias = {0.0, 0.0};
    CHECK(input_gradient(m, Vec{0.5}, Vec{1.0, 0.0})[0] == 0.0);
    CHECK(input_gradient(m, Vec{0.6}, Vec{1.0, 0.0})[0] == 1.0);
    CHECK_THROWS_AS(input_gradient(m, Vec{0.5}, Vec{1.0}), std::invalid_argument);
}

TEST_CASE("network is affine between kinks") {
    std::mt19937_64 rng(9);
    const MlpModel m = random_model(12, 2, {8}, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x = test::uniform_point(rng, 2, 0.1, 0.9);
        const Vec d = test::uniform_point(rng, 2, -1e-6, 1e-6);
        Vec y{x[0] + d[0], x[1] + d[1]};
        Vec mid{x[0] + 0.5 * d[0], x[1] + 0.5 * d[1]};
        const auto px = hidden_preactivations(m, x)[0];
        const auto py = hidden_preactivations(m, y)[0];
        bool same = true;
        for (std::size_t h = 0; h < px.size(); ++h) same = same && ((px[h] > 0) == (py[h] > 0));
        if (!same) continue;
        const Vec zx = forward_logits(m, x), zy = forward_logits(m, y), zm = forward_logits(m, mid);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(zm[c] == doctest::Approx(0.5 * (zx[c] + zy[c])).epsilon(1e-12));
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const MlpModel m = random_model(1, 2, {3}, 2);
    CHECK_THROWS_AS(forward_logits(m, Vec{0.1}), std::invalid_argument);
    CHECK_THROWS_AS(make_mlp(2, std::vector<std::size_t>{3}, 1), std::invalid_argument);
}

TEST_CASE("model JSON round trip is exact") {
    const MlpModel m = random_model(21, 3, {4, 5}, 3);
    const MlpModel back = model_from_json(model_to_json(m));
    REQUIRE(back.depth() == m.depth());
    for (std::size_t l = 0; l < m.depth(); ++l) {
        CHECK(back.layers[l].weight == m.layers[l].weight);
        CHECK(back.layers[l].bias == m.layers[l].bias);
    }
    CHECK(model_to_json(back) == model_to_json(m));
    CHECK_THROWS(model_from_json(R"({"input_dim":2,"classes":2,"layers":[]})"));
}

TEST_CASE("initialisation and training are deterministic per seed") {
    const MlpModel a = random_model(4, 2, {8}, 2);
    const MlpModel b = random_model(4, 2, {8}, 2);
    const MlpModel c = random_model(5, 2, {8}, 2);
    CHECK(model_to_json(a) == model_to_json(b));
    CHECK(model_to_json(a) != model_to_json(c));

    const LabeledDataset d = two_moons(200, 0.1, 3);
    TrainConfig tc;
    tc.epochs = 5;
    CHECK(model_to_json(train(a, d, tc)) == model_to_json(train(b, d, tc)));
    tc.epochs = 0;
    CHECK_THROWS_AS(train(a, d, tc), std::invalid_argument);
    tc.epochs = 5;
    CHECK_THROWS_AS(train(a, LabeledDataset{2, 2, {}, {}}, tc), std::invalid_argument);
}

TEST_CASE("trained two-moons classifier") {
    const Prepared& p = test::moons();
    CHECK(p.test_accuracy >= 0.90);
    // Apexes of the outer (label 1) and inner (label 2) arcs after rescaling.
    CHECK(classify(p.model, Vec{0.35, 0.9}) == 1);
    CHECK(classify(p.model, Vec{0.65, 0.1}) == 2);
    CHECK(cross_entropy(p.model, p.train) < 0.2);
}

TEST_CASE("zero model and single linear layer") {
    const MlpModel zero = make_mlp(2, std::vector<std::size_t>{4}, 2);
    CHECK(forward_logits(zero, Vec{0.3, 0.7}) == Vec{0.0, 0.0});
    MlpModel lin = make_mlp(2, std::vector<std::size_t>{}, 2);
    lin.layers[0].weight = {1.0, 0.0, 0.0, 2.0};
    CHECK(forward_logits(lin, Vec{0.5, 0.5}) == Vec{0.5, 1.0});
    CHECK(hidden_preactivations(lin, Vec{0.5, 0.5}).empty());
}

TEST_CASE("softmax symmetry, stability and normalisation") {
    CHECK(softmax(Vec{0.0, 0.0}) == Vec{0.5, 0.5});
    const Vec p = softmax(Vec{1000.0, 0.0});
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 1e-300);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const Vec z = test::uniform_point(rng, 5, -50.0, 50.0);
        const Vec q = softmax(z);
        double s = 0.0;
        for (double v : q) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

TEST_CASE("accuracy counts exact matches and treats ties as errors") {
    MlpModel lin = make_mlp(2, std::vector<std::size_t>{}, 2);
    lin.layers[0].weight = {1.0, 0.0, 0.0, 1.0};  // class = larger coordinate
    LabeledDataset d{2, 2, {{0.9, 0.1}, {0.2, 0.8}, {0.4, 0.4}}, {1, 2, 1}};
    // The third point is an exact tie: counted wrong.
    CHECK(accuracy(lin, d) == doctest::Approx(2.0 / 3.0));
    LabeledDataset good{2, 2, {{0.9, 0.1}, {0.2, 0.8}}, {1, 2}};
    CHECK(accuracy(lin, good) == 1.0);
    LabeledDataset bad{2, 2, {{0.9, 0.1}, {0.2, 0.8}}, {2, 1}};
    CHECK(accuracy(lin, bad) == 0.0);
}
