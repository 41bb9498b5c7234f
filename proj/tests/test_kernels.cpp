#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "cwlab/kernels.hpp"

using namespace cwlab;

namespace {

std::vector<const kernels::KernelTable*> variants() {
    std::vector<const kernels::KernelTable*> v;
    for (const char* name : {"avx2", "neon"}) {
        if (const auto* t = kernels::find(name)) v.push_back(t);
    }
    return v;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("scalar table is always available and named") {
    CHECK(kernels::scalar_table().name == "scalar");
    CHECK(kernels::find("scalar") == &kernels::scalar_table());
    CHECK(kernels::find("no-such-isa") == nullptr);
}

TEST_CASE("dot matches a long double reference") {
    std::mt19937_64 rng(7);
    const auto& s = kernels::scalar_table();
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 1001u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(a[i]) * b[i];
        CHECK(rel_err(s.dot(a.data(), b.data(), n), static_cast<double>(ref)) < 1e-13);
    }
}

TEST_CASE("vectorized kernels agree with the scalar reference") {
    const auto& s = kernels::scalar_table();
    std::mt19937_64 rng(11);
    for (const auto* v : variants()) {
        CAPTURE(v->name);
        for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 8u, 9u, 31u, 256u, 1003u}) {
            const auto a = random_vec(rng, n);
            const auto b = random_vec(rng, n);
            CHECK(rel_err(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)) < 1e-13);
        }
        for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 2}, {8, 2},
                                  {2, 8}, {5, 13}, {16, 9}, {33, 70}}) {
            const auto w = random_vec(rng, rows * cols);
            const auto bias = random_vec(rng, rows);
            const auto x = random_vec(rng, cols);
            const auto d = random_vec(rng, rows);
            std::vector<double> y1(rows), y2(rows), t1(cols), t2(cols);
            s.gemv(w.data(), bias.data(), x.data(), y1.data(), rows, cols);
            v->gemv(w.data(), bias.data(), x.data(), y2.data(), rows, cols);
            s.gemv_t(w.data(), d.data(), t1.data(), rows, cols);
            v->gemv_t(w.data(), d.data(), t2.data(), rows, cols);
            for (std::size_t r = 0; r < rows; ++r) CHECK(rel_err(y1[r], y2[r]) < 1e-13);
            for (std::size_t c = 0; c < cols; ++c) CHECK(rel_err(t1[c], t2[c]) < 1e-13);
        }
        for (std::size_t n : {1u, 3u, 4u, 5u, 100u}) {
            auto x1 = random_vec(rng, n);
            for (double& e : x1) e = 0.5 + 0.25 * e;
            auto x2 = x1;
            const auto g = random_vec(rng, n);
            s.step_clamp(x1.data(), g.data(), 0.3, n);
            v->step_clamp(x2.data(), g.data(), 0.3, n);
            // Elementwise x - s*g with no reduction: identical bits expected.
            for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);
        }
    }
}

TEST_CASE("step_clamp clamps to the unit box") {
    std::vector<double> x{0.5, 0.5, 0.5, 0.0, 1.0};
    const std::vector<double> g{10.0, -10.0, 0.0, 1.0, -1.0};
    kernels::scalar_table().step_clamp(x.data(), g.data(), 0.1, x.size());
    CHECK(x == std::vector<double>{0.0, 1.0, 0.5, 0.0, 1.0});
}

TEST_CASE("active table honours the scalar override") {
    // active() caches on first use, so only check consistency with the env.
    const char* env = std::getenv("CWLAB_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") {
        CHECK(kernels::active().name == "scalar");
    } else {
        CHECK(kernels::find(kernels::active().name) == &kernels::active());
    }
}
