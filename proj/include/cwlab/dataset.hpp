#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cwlab {

using Vec = std::vector<double>;

/// Points in the unit box with class labels in {1..classes}.
struct LabeledDataset {
    std::size_t dim = 0;
    std::size_t classes = 0;
    std::vector<Vec> points;
    std::vector<int> labels;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    /// Throws std::invalid_argument if a point leaves [0,1]^dim, a label is
    /// out of range, or the two lists differ in length.
    void validate() const;

    /// Subset in the given index order.
    LabeledDataset subset(std::span<const std::size_t> indices) const;
};

}  // namespace cwlab
