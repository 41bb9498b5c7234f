#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "cwlab/dataset.hpp"

namespace cwlab {

/// Two interleaving half circles with Gaussian coordinate noise, rescaled
/// per coordinate into [0.05, 0.95]^2. Labels 1 (outer arc) and 2 (inner
/// arc); class sizes differ by at most one; sample order is shuffled.
LabeledDataset two_moons(std::size_t n_samples, double noise_sd, std::uint64_t seed);

/// `classes` Gaussian clusters around fixed centres in [0,1]^dim, clipped to
/// the box. Centres sit on a circle of radius 0.3 about the box centre in the
/// first two coordinates (0.5 elsewhere); for dim == 1 they are evenly spaced.
LabeledDataset blobs(std::size_t n_samples, std::size_t classes, std::size_t dim, double spread,
                     std::uint64_t seed);

/// Index lists of a seeded random split into two halves whose sizes differ by
/// at most one (the first half gets the extra element).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_half_indices(
    std::size_t n, std::uint64_t seed);

std::pair<LabeledDataset, LabeledDataset> split_half(const LabeledDataset& data,
                                                     std::uint64_t seed);

/// First `head` samples and the remainder.
std::pair<LabeledDataset, LabeledDataset> split_head(const LabeledDataset& data, std::size_t head);

// CSV with header x0,...,x{n-1},label.
std::string dataset_to_csv(const LabeledDataset& data);
LabeledDataset dataset_from_csv(const std::string& text, std::size_t classes = 0);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path, std::size_t classes = 0);

}  // namespace cwlab
