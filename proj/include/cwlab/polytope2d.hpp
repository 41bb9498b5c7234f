#pragma once

// Exact linear-region analysis of one-hidden-layer ReLU networks on [0,1]^2.
//
// The hidden neurons define lines w_h . x + b_h = 0. Their arrangement,
// intersected with the unit square, splits it into convex cells on which the
// logit map is affine: Z(x) = A x + beta. Decision-boundary segments are the
// pieces of the tie lines Z_i = Z_j (i, j the top two classes) inside each
// cell. Stationary points of the l2 attack objective on the boundary are
// certified by solving 2 (x0 - x*) = a sum_i lambda_i g_i with lambda_i >= 0,
// sum lambda_i <= 1, where g_i are the penalty gradients of the cells
// meeting x*. The box normal cone is not modelled (interior points only).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwlab/network.hpp"

namespace cwlab::poly {

using P2 = std::array<double, 2>;

/// normal . x + offset = 0
struct Line {
    P2 normal{};
    double offset = 0.0;
};

struct Cell {
    std::uint64_t pattern = 0;  // bit h set when hidden neuron h is active
    std::vector<P2> vertices;   // counter-clockwise
    Vec A;                      // [classes x 2] row-major
    Vec beta;                   // [classes]
    double area = 0.0;
    P2 centroid{};

    /// Z at p through the cell's affine map.
    Vec logits(const P2& p) const;
    P2 row(std::size_t cls0) const { return {A[2 * cls0], A[2 * cls0 + 1]}; }
};

struct BoundarySegment {
    P2 a{};
    P2 b{};
    std::size_t cell = 0;
    int class_i = 0;  // 1-based, class_i < class_j
    int class_j = 0;
};

struct PolytopeMap {
    std::size_t classes = 0;
    std::vector<Line> hyperplanes;
    std::vector<Cell> cells;
    std::vector<BoundarySegment> boundary;
    double grad_min = 0.0;  // c
    double grad_max = 0.0;  // C

    /// Activation bitmask of the hidden layer at p (relu'(0) = 0 convention).
    std::uint64_t pattern_at(const P2& p) const;

    /// Cell whose closure contains p, if any.
    std::optional<std::size_t> locate(const P2& p) const;
};

PolytopeMap enumerate_regions(const MlpModel& model);

/// Tie segments of the top two logits inside every cell.
std::vector<BoundarySegment> decision_boundary(const PolytopeMap& pmap);

/// Gradient of Z_t - Z_j on the cell, j the runner-up to t at the centroid.
P2 cell_penalty_gradient(const Cell& cell, int t);

struct GradientBounds {
    double c = 0.0;
    double C = 0.0;
    bool has_boundary = false;
};

/// Min and max of ||grad(Z_i - Z_j)|| over the cells carrying boundary segments.
GradientBounds boundary_gradient_bounds(const PolytopeMap& pmap);

/// Euclidean distance from p to the nearest boundary segment (infinity when
/// there is none).
double distance_to_boundary(const PolytopeMap& pmap, const P2& p);

struct StationaryCertificate {
    P2 point{};
    std::vector<std::size_t> cells;
    std::vector<P2> gradients;
    std::vector<double> multipliers;
    double residual = 0.0;  // || 2 (x0 - x*) - a sum lambda_i g_i ||
};

inline constexpr double kAnalyticResidualTol = 1e-8;
inline constexpr double kGridResolution = 1e-4;

/// Every certified stationary point on the boundary of the region of class
/// kappa(x0) for penalty weight a (analytic mode).
std::vector<StationaryCertificate> stationary_points(const PolytopeMap& pmap,
                                                     const MlpModel& model, const P2& x0,
                                                     double a);

/// Certified point nearest to `reference` (x0 when omitted).
std::optional<StationaryCertificate> stationary_point_near(const PolytopeMap& pmap,
                                                           const MlpModel& model, const P2& x0,
                                                           double a,
                                                           std::optional<P2> reference = {});

/// Grid fallback: boundary points at the given resolution whose residual is a
/// local minimum along the boundary and at most 1e-4 * a; nearest to
/// `reference` (x0 when omitted).
std::optional<StationaryCertificate> stationary_point_grid(const PolytopeMap& pmap,
                                                           const MlpModel& model, const P2& x0,
                                                           double a,
                                                           std::optional<P2> reference = {},
                                                           double resolution = kGridResolution);

/// True iff the closed disk B(x*, 3 eps) lies in the unit square and inside
/// the union of the cells whose closure contains x*.
bool ball_eligibility(const PolytopeMap& pmap, const P2& x_star, double eps);

/// True iff every iterate lies within 3 eps of x* (Euclidean).
bool verify_theorem2(std::span<const Vec> iterates, const P2& x_star, double eps);

/// Scans the boundary within `radius` of x* at the grid resolution for another
/// stationary point (grid residual test). True iff none is found farther than
/// a few grid steps from x*.
bool isolation_check(const PolytopeMap& pmap, const MlpModel& model, const P2& x0, double a,
                     const P2& x_star, double radius);

/// {"cells":[{"pattern","vertices","A","beta"}],"boundary":[...],"c","C"}
std::string region_json(const PolytopeMap& pmap);

double polygon_area(std::span<const P2> poly);
double point_polygon_distance(const P2& p, std::span<const P2> poly);

}  // namespace cwlab::poly
