#include "cwlab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cwlab/io.hpp"

namespace cwlab {

void LabeledDataset::validate() const {
    if (points.size() != labels.size()) {
        throw std::invalid_argument("dataset has different numbers of points and labels");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim) {
            throw std::invalid_argument("point " + std::to_string(i) + " has wrong dimension");
        }
        for (double v : points[i]) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("point " + std::to_string(i) + " leaves the unit box");
            }
        }
        if (labels[i] < 1 || static_cast<std::size_t>(labels[i]) > classes) {
            throw std::invalid_argument("label of point " + std::to_string(i) + " out of range");
        }
    }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
    LabeledDataset out;
    out.dim = dim;
    out.classes = classes;
    out.points.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.points.push_back(points.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

LabeledDataset two_moons(std::size_t n_samples, double noise_sd, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("two_moons needs at least 2 samples");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise must be >= 0");

    const std::size_t n_outer = n_samples / 2;
    const std::size_t n_inner = n_samples - n_outer;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    LabeledDataset d;
    d.dim = 2;
    d.classes = 2;
    auto arc = [](std::size_t i, std::size_t count) {
        return count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1)
                         : 0.0;
    };
    for (std::size_t i = 0; i < n_outer; ++i) {
        const double t = arc(i, n_outer);
        d.points.push_back({std::cos(t), std::sin(t)});
        d.labels.push_back(1);
    }
    for (std::size_t i = 0; i < n_inner; ++i) {
        const double t = arc(i, n_inner);
        d.points.push_back({1.0 - std::cos(t), 0.5 - std::sin(t)});
        d.labels.push_back(2);
    }
    if (noise_sd > 0.0) {
        for (Vec& p : d.points) {
            for (double& v : p) v += noise_sd * noise(rng);
        }
    }

    for (std::size_t k = 0; k < 2; ++k) {
        double lo = d.points[0][k];
        double hi = lo;
        for (const Vec& p : d.points) {
            lo = std::min(lo, p[k]);
            hi = std::max(hi, p[k]);
        }
        const double span = hi - lo;
        for (Vec& p : d.points) {
            const double u = span > 0.0 ? (p[k] - lo) / span : 0.5;
            p[k] = std::clamp(0.05 + 0.9 * u, 0.05, 0.95);
        }
    }

    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    return d.subset(order);
}

LabeledDataset blobs(std::size_t n_samples, std::size_t classes, std::size_t dim, double spread,
                     std::uint64_t seed) {
    if (classes < 2) throw std::invalid_argument("blobs needs at least 2 classes");
    if (dim < 1) throw std::invalid_argument("blobs needs dimension >= 1");
    if (!(spread >= 0.0)) throw std::invalid_argument("spread must be >= 0");

    std::vector<Vec> centers(classes, Vec(dim, 0.5));
    for (std::size_t k = 0; k < classes; ++k) {
        if (dim == 1) {
            centers[k][0] = 0.1 + 0.8 * static_cast<double>(k) / static_cast<double>(classes - 1);
        } else {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(classes);
            centers[k][0] = 0.5 + 0.3 * std::cos(phi);
            centers[k][1] = 0.5 + 0.3 * std::sin(phi);
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    LabeledDataset d;
    d.dim = dim;
    d.classes = classes;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::size_t k = i % classes;
        Vec p = centers[k];
        if (spread > 0.0) {
            for (double& v : p) v = std::clamp(v + spread * noise(rng), 0.0, 1.0);
        }
        d.points.push_back(std::move(p));
        d.labels.push_back(static_cast<int>(k) + 1);
    }
    return d;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_half_indices(
    std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t first = n - n / 2;
    std::vector<std::size_t> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first));
    std::vector<std::size_t> b(order.begin() + static_cast<std::ptrdiff_t>(first), order.end());
    return {std::move(a), std::move(b)};
}

std::pair<LabeledDataset, LabeledDataset> split_half(const LabeledDataset& data,
                                                     std::uint64_t seed) {
    if (data.size() < 2) throw std::invalid_argument("split_half needs at least 2 samples");
    auto [a, b] = split_half_indices(data.size(), seed);
    return {data.subset(a), data.subset(b)};
}

std::pair<LabeledDataset, LabeledDataset> split_head(const LabeledDataset& data,
                                                     std::size_t head) {
    if (head > data.size()) throw std::invalid_argument("split_head beyond dataset size");
    std::vector<std::size_t> a(head);
    std::iota(a.begin(), a.end(), std::size_t{0});
    std::vector<std::size_t> b(data.size() - head);
    std::iota(b.begin(), b.end(), head);
    return {data.subset(a), data.subset(b)};
}

std::string dataset_to_csv(const LabeledDataset& data) {
    std::string out;
    for (std::size_t k = 0; k < data.dim; ++k) out += "x" + std::to_string(k) + ",";
    out += "label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.points[i]) {
            out += io::format_double(v);
            out += ',';
        }
        out += std::to_string(data.labels[i]);
        out += '\n';
    }
    return out;
}

LabeledDataset dataset_from_csv(const std::string& text, std::size_t classes) {
    const auto lines = io::split_lines(text);
    if (lines.empty()) throw std::invalid_argument("dataset CSV is empty");
    const auto header = io::split_csv_line(lines[0]);
    if (header.size() < 2 || header.back() != "label") {
        throw std::invalid_argument("dataset CSV header must end with 'label'");
    }
    LabeledDataset d;
    d.dim = header.size() - 1;
    int max_label = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = io::split_csv_line(lines[i]);
        if (fields.size() != header.size()) {
            throw std::invalid_argument("dataset CSV row " + std::to_string(i) +
                                        " has the wrong number of fields");
        }
        Vec p(d.dim);
        for (std::size_t k = 0; k < d.dim; ++k) p[k] = io::parse_double(fields[k]);
        const int label = static_cast<int>(io::parse_double(fields.back()));
        max_label = std::max(max_label, label);
        d.points.push_back(std::move(p));
        d.labels.push_back(label);
    }
    d.classes = classes != 0 ? classes : static_cast<std::size_t>(std::max(max_label, 2));
    d.validate();
    return d;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
    io::write_file_atomic(path, dataset_to_csv(data));
}

LabeledDataset load_dataset(const std::filesystem::path& path, std::size_t classes) {
    return dataset_from_csv(io::read_file(path), classes);
}

}  // namespace cwlab
