#include "cwlab/polytope2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace cwlab::poly {

namespace {

// Signed distances within this band count as lying on a line.
constexpr double kLineTol = 1e-12;
constexpr double kMinArea = 1e-18;
constexpr double kPointTol = 1e-9;

P2 sub(const P2& a, const P2& b) { return {a[0] - b[0], a[1] - b[1]}; }
P2 add(const P2& a, const P2& b) { return {a[0] + b[0], a[1] + b[1]}; }
P2 scale(const P2& a, double s) { return {a[0] * s, a[1] * s}; }
double dot(const P2& a, const P2& b) { return a[0] * b[0] + a[1] * b[1]; }
double cross(const P2& a, const P2& b) { return a[0] * b[1] - a[1] * b[0]; }
double norm(const P2& a) { return std::hypot(a[0], a[1]); }
double dist(const P2& a, const P2& b) { return norm(sub(a, b)); }

double signed_distance(const Line& l, const P2& p) {
    return (dot(l.normal, p) + l.offset) / norm(l.normal);
}

/// Part of a convex polygon on the chosen side of a line (closed half-plane).
std::vector<P2> clip(const std::vector<P2>& poly, const Line& l, bool positive) {
    std::vector<P2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const P2& p = poly[i];
        const P2& q = poly[(i + 1) % n];
        double sp = signed_distance(l, p);
        double sq = signed_distance(l, q);
        if (!positive) {
            sp = -sp;
            sq = -sq;
        }
        const bool in_p = sp >= -kLineTol;
        const bool in_q = sq >= -kLineTol;
        if (in_p) out.push_back(p);
        if (in_p != in_q) {
            const double t = std::clamp(sp / (sp - sq), 0.0, 1.0);
            out.push_back(add(p, scale(sub(q, p), t)));
        }
    }
    std::vector<P2> dedup;
    for (const P2& p : out) {
        if (dedup.empty() || dist(dedup.back(), p) > 1e-15) dedup.push_back(p);
    }
    while (dedup.size() > 1 && dist(dedup.front(), dedup.back()) <= 1e-15) dedup.pop_back();
    return dedup;
}

P2 polygon_centroid(std::span<const P2> poly) {
    double a = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2& p = poly[i];
        const P2& q = poly[(i + 1) % poly.size()];
        const double w = cross(p, q);
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    if (std::abs(a) < 1e-300) {
        P2 m{0.0, 0.0};
        for (const P2& p : poly) m = add(m, p);
        return scale(m, 1.0 / static_cast<double>(poly.size()));
    }
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

double point_segment_distance(const P2& p, const P2& a, const P2& b) {
    const P2 ab = sub(b, a);
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    const double t = std::clamp(dot(sub(p, a), ab) / len2, 0.0, 1.0);
    return dist(p, add(a, scale(ab, t)));
}

/// Parameter interval of {p0 + t d} satisfying n.x + o >= -slack.
bool restrict_interval(const P2& p0, const P2& d, const P2& n, double o, double& lo, double& hi) {
    const double nn = norm(n);
    if (nn == 0.0) return o >= 0.0;
    const double base = (dot(n, p0) + o) / nn;
    const double rate = dot(n, d) / nn;
    if (std::abs(rate) < 1e-15) return base >= -kLineTol;
    const double t = -(base + kLineTol) / rate;
    if (rate > 0.0) {
        lo = std::max(lo, t);
    } else {
        hi = std::min(hi, t);
    }
    return lo <= hi;
}

/// Chord of a convex CCW polygon along the line n.x + o = 0, further restricted
/// by extra half-planes.
std::optional<std::pair<P2, P2>> chord(std::span<const P2> poly, const P2& n, double o,
                                       std::span<const std::pair<P2, double>> extra) {
    const double nn = norm(n);
    if (nn < 1e-14) return std::nullopt;
    const P2 p0 = scale(n, -o / (nn * nn));
    const P2 d{-n[1] / nn, n[0] / nn};
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2& v = poly[i];
        const P2 e = sub(poly[(i + 1) % poly.size()], v);
        // inside: cross(e, x - v) >= 0, i.e. (-e1, e0).x - (-e1, e0).v >= 0
        const P2 en{-e[1], e[0]};
        if (!restrict_interval(p0, d, en, -dot(en, v), lo, hi)) return std::nullopt;
    }
    for (const auto& [en, eo] : extra) {
        if (!restrict_interval(p0, d, en, eo, lo, hi)) return std::nullopt;
    }
    if (!(hi - lo > kLineTol)) return std::nullopt;
    return std::make_pair(add(p0, scale(d, lo)), add(p0, scale(d, hi)));
}

struct ConeFit {
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> multipliers;  // one per gradient
};

/// Best lambda >= 0, sum <= 1 with v ~ a sum lambda_i g_i using at most two
/// gradients (enough in the plane). Residual is ||v - a sum lambda_i g_i||.
ConeFit fit_cone(const P2& v, double a, std::span<const P2> gs) {
    ConeFit best;
    best.residual = norm(v);
    best.multipliers.assign(gs.size(), 0.0);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const P2 ag = scale(gs[i], a);
        const double gg = dot(ag, ag);
        if (gg == 0.0) continue;
        const double lam = std::clamp(dot(v, ag) / gg, 0.0, 1.0);
        const double r = norm(sub(v, scale(ag, lam)));
        if (r < best.residual) {
            best.residual = r;
            std::fill(best.multipliers.begin(), best.multipliers.end(), 0.0);
            best.multipliers[i] = lam;
        }
    }
    for (std::size_t i = 0; i < gs.size(); ++i) {
        for (std::size_t j = i + 1; j < gs.size(); ++j) {
            const P2 gi = scale(gs[i], a);
            const P2 gj = scale(gs[j], a);
            const double det = cross(gi, gj);
            if (std::abs(det) <= 1e-14 * norm(gi) * norm(gj)) continue;
            const double li = cross(v, gj) / det;
            const double lj = cross(gi, v) / det;
            if (li < -1e-12 || lj < -1e-12 || li + lj > 1.0 + 1e-12) continue;
            const double r = norm(sub(v, add(scale(gi, li), scale(gj, lj))));
            if (r < best.residual) {
                best.residual = r;
                std::fill(best.multipliers.begin(), best.multipliers.end(), 0.0);
                best.multipliers[i] = std::max(li, 0.0);
                best.multipliers[j] = std::max(lj, 0.0);
            }
        }
    }
    return best;
}

struct RelevantSegment {
    const BoundarySegment* seg;
    P2 grad;  // grad of Z_t - Z_other on the segment's cell
};

std::vector<RelevantSegment> relevant_segments(const PolytopeMap& pmap, int t) {
    std::vector<RelevantSegment> out;
    for (const BoundarySegment& s : pmap.boundary) {
        if (s.class_i != t && s.class_j != t) continue;
        const int other = s.class_i == t ? s.class_j : s.class_i;
        const Cell& cell = pmap.cells[s.cell];
        const P2 g = sub(cell.row(static_cast<std::size_t>(t - 1)),
                         cell.row(static_cast<std::size_t>(other - 1)));
        out.push_back({&s, g});
    }
    return out;
}

int start_class(const MlpModel& model, const P2& x0) {
    const int t = classify(model, x0);
    if (t == 0) throw std::invalid_argument("stationary point search: x0 lies on the boundary");
    return t;
}

/// Gradients of the relevant segments passing within `radius` of p, one per cell.
void gather_gradients(std::span<const RelevantSegment> rel, const P2& p, double radius,
                      std::vector<P2>& grads, std::vector<std::size_t>& cells) {
    grads.clear();
    cells.clear();
    for (const RelevantSegment& r : rel) {
        if (point_segment_distance(p, r.seg->a, r.seg->b) > radius) continue;
        if (std::find(cells.begin(), cells.end(), r.seg->cell) != cells.end()) continue;
        cells.push_back(r.seg->cell);
        grads.push_back(r.grad);
    }
}

struct GridCandidate {
    P2 point;
    double residual;
    std::vector<std::size_t> cells;
    std::vector<P2> grads;
    std::vector<double> multipliers;
};

/// Residual local minima along every relevant segment, sampled at `h`,
/// restricted to samples within `radius` of `center` when given.
std::vector<GridCandidate> grid_minima(const PolytopeMap& pmap, const P2& x0, double a, int t,
                                       double h, double tol, std::optional<P2> center,
                                       double radius) {
    const auto rel = relevant_segments(pmap, t);
    std::vector<GridCandidate> out;
    std::vector<P2> grads;
    std::vector<std::size_t> cells;
    for (const RelevantSegment& r : rel) {
        const double len = dist(r.seg->a, r.seg->b);
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h)));
        std::vector<GridCandidate> samples;
        samples.reserve(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double s = static_cast<double>(k) / static_cast<double>(m);
            const P2 p = add(r.seg->a, scale(sub(r.seg->b, r.seg->a), s));
            if (center && dist(p, *center) > radius) {
                samples.push_back({p, std::numeric_limits<double>::infinity(), {}, {}, {}});
                continue;
            }
            gather_gradients(rel, p, h + kLineTol, grads, cells);
            const ConeFit fit = fit_cone(scale(sub(x0, p), 2.0), a, grads);
            samples.push_back({p, fit.residual, cells, grads, fit.multipliers});
        }
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double rk = samples[k].residual;
            if (!(rk <= tol)) continue;
            const bool left_ok = k == 0 || rk <= samples[k - 1].residual;
            const bool right_ok = k + 1 == samples.size() || rk <= samples[k + 1].residual;
            if (left_ok && right_ok) out.push_back(samples[k]);
        }
    }
    return out;
}

}  // namespace

Vec Cell::logits(const P2& p) const {
    Vec z(beta);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += A[2 * i] * p[0] + A[2 * i + 1] * p[1];
    return z;
}

double polygon_area(std::span<const P2> poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        a += cross(poly[i], poly[(i + 1) % poly.size()]);
    }
    return 0.5 * a;
}

double point_polygon_distance(const P2& p, std::span<const P2> poly) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return dist(p, poly[0]);
    bool inside = poly.size() >= 3;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2& a = poly[i];
        const P2& b = poly[(i + 1) % poly.size()];
        if (cross(sub(b, a), sub(p, a)) < 0.0) inside = false;
        best = std::min(best, point_segment_distance(p, a, b));
    }
    return inside ? 0.0 : best;
}

std::uint64_t PolytopeMap::pattern_at(const P2& p) const {
    std::uint64_t bits = 0;
    for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
        const Line& l = hyperplanes[h];
        if (dot(l.normal, p) + l.offset > 0.0) bits |= std::uint64_t{1} << h;
    }
    return bits;
}

std::optional<std::size_t> PolytopeMap::locate(const P2& p) const {
    const std::uint64_t bits = pattern_at(p);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].pattern == bits && point_polygon_distance(p, cells[i].vertices) <= kPointTol) {
            return i;
        }
    }
    std::optional<std::size_t> best;
    double best_d = kPointTol;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double d = point_polygon_distance(p, cells[i].vertices);
        if (d <= best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

PolytopeMap enumerate_regions(const MlpModel& model) {
    model.validate();
    if (model.depth() != 2) {
        throw std::invalid_argument("exact region enumeration needs exactly one hidden layer");
    }
    if (model.input_dim() != 2) {
        throw std::invalid_argument("exact region enumeration needs a 2-input model");
    }
    const DenseLayer& hid = model.layers[0];
    const DenseLayer& out = model.layers[1];
    if (hid.out_dim > 64) throw std::invalid_argument("at most 64 hidden neurons supported");

    PolytopeMap pm;
    pm.classes = model.num_classes();
    for (std::size_t h = 0; h < hid.out_dim; ++h) {
        pm.hyperplanes.push_back({{hid.w(h, 0), hid.w(h, 1)}, hid.bias[h]});
    }

    struct Piece {
        std::uint64_t pattern;
        std::vector<P2> poly;
    };
    std::vector<Piece> pieces{{0, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}}};
    for (std::size_t h = 0; h < pm.hyperplanes.size(); ++h) {
        const Line& l = pm.hyperplanes[h];
        const std::uint64_t bit = std::uint64_t{1} << h;
        std::vector<Piece> next;
        if (norm(l.normal) < 1e-300) {
            for (Piece& p : pieces) {
                if (l.offset > 0.0) p.pattern |= bit;
                next.push_back(std::move(p));
            }
            pieces.swap(next);
            continue;
        }
        for (Piece& p : pieces) {
            double smin = std::numeric_limits<double>::infinity();
            double smax = -smin;
            for (const P2& v : p.poly) {
                const double s = signed_distance(l, v);
                smin = std::min(smin, s);
                smax = std::max(smax, s);
            }
            if (smin >= -kLineTol) {
                p.pattern |= bit;
                next.push_back(std::move(p));
            } else if (smax <= kLineTol) {
                next.push_back(std::move(p));
            } else {
                auto pos = clip(p.poly, l, true);
                auto neg = clip(p.poly, l, false);
                if (pos.size() >= 3 && polygon_area(pos) > kMinArea) {
                    next.push_back({p.pattern | bit, std::move(pos)});
                }
                if (neg.size() >= 3 && polygon_area(neg) > kMinArea) {
                    next.push_back({p.pattern, std::move(neg)});
                }
            }
        }
        pieces.swap(next);
    }

    const std::size_t classes = out.out_dim;
    for (Piece& p : pieces) {
        Cell cell;
        cell.pattern = p.pattern;
        cell.vertices = std::move(p.poly);
        cell.area = polygon_area(cell.vertices);
        cell.centroid = polygon_centroid(cell.vertices);
        cell.A.assign(classes * 2, 0.0);
        cell.beta = out.bias;
        for (std::size_t h = 0; h < hid.out_dim; ++h) {
            if ((cell.pattern >> h & 1U) == 0) continue;
            for (std::size_t k = 0; k < classes; ++k) {
                const double v = out.w(k, h);
                cell.A[2 * k] += v * hid.w(h, 0);
                cell.A[2 * k + 1] += v * hid.w(h, 1);
                cell.beta[k] += v * hid.bias[h];
            }
        }
        pm.cells.push_back(std::move(cell));
    }

    pm.boundary = decision_boundary(pm);
    const GradientBounds gb = boundary_gradient_bounds(pm);
    pm.grad_min = gb.c;
    pm.grad_max = gb.C;
    return pm;
}

std::vector<BoundarySegment> decision_boundary(const PolytopeMap& pmap) {
    std::vector<BoundarySegment> segs;
    const std::size_t classes = pmap.classes;
    for (std::size_t ci = 0; ci < pmap.cells.size(); ++ci) {
        const Cell& cell = pmap.cells[ci];
        for (std::size_t i = 0; i < classes; ++i) {
            for (std::size_t j = i + 1; j < classes; ++j) {
                const P2 n = sub(cell.row(i), cell.row(j));
                const double o = cell.beta[i] - cell.beta[j];
                // i (equivalently j on the tie line) must beat every other class.
                std::vector<std::pair<P2, double>> extra;
                for (std::size_t k = 0; k < classes; ++k) {
                    if (k == i || k == j) continue;
                    extra.emplace_back(sub(cell.row(i), cell.row(k)), cell.beta[i] - cell.beta[k]);
                }
                auto ch = chord(cell.vertices, n, o, extra);
                if (!ch) continue;
                segs.push_back({ch->first, ch->second, ci, static_cast<int>(i) + 1,
                                static_cast<int>(j) + 1});
            }
        }
    }
    return segs;
}

P2 cell_penalty_gradient(const Cell& cell, int t) {
    const std::size_t classes = cell.beta.size();
    if (t < 1 || static_cast<std::size_t>(t) > classes) {
        throw std::invalid_argument("cell_penalty_gradient: class out of range");
    }
    const auto ti = static_cast<std::size_t>(t - 1);
    const Vec z = cell.logits(cell.centroid);
    std::size_t other = ti == 0 ? 1 : 0;
    for (std::size_t k = 0; k < classes; ++k) {
        if (k != ti && z[k] > z[other]) other = k;
    }
    return sub(cell.row(ti), cell.row(other));
}

GradientBounds boundary_gradient_bounds(const PolytopeMap& pmap) {
    GradientBounds gb;
    for (const BoundarySegment& s : pmap.boundary) {
        const Cell& cell = pmap.cells[s.cell];
        const double g = norm(sub(cell.row(static_cast<std::size_t>(s.class_i - 1)),
                                  cell.row(static_cast<std::size_t>(s.class_j - 1))));
        if (!gb.has_boundary) {
            gb.c = gb.C = g;
            gb.has_boundary = true;
        } else {
            gb.c = std::min(gb.c, g);
            gb.C = std::max(gb.C, g);
        }
    }
    return gb;
}

double distance_to_boundary(const PolytopeMap& pmap, const P2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const BoundarySegment& s : pmap.boundary) {
        best = std::min(best, point_segment_distance(p, s.a, s.b));
    }
    return best;
}

std::vector<StationaryCertificate> stationary_points(const PolytopeMap& pmap,
                                                     const MlpModel& model, const P2& x0,
                                                     double a) {
    if (!(a > 0.0)) throw std::invalid_argument("stationary point search needs a > 0");
    const int t = start_class(model, x0);
    const auto rel = relevant_segments(pmap, t);
    std::vector<StationaryCertificate> certs;
    auto push = [&](StationaryCertificate c) {
        for (const StationaryCertificate& e : certs) {
            if (dist(e.point, c.point) <= kPointTol) return;
        }
        certs.push_back(std::move(c));
    };

    // Interior of a segment: x0 - x* must be normal to it.
    for (const RelevantSegment& r : rel) {
        const P2 ab = sub(r.seg->b, r.seg->a);
        const double len = norm(ab);
        if (len == 0.0) continue;
        const P2 u = scale(ab, 1.0 / len);
        const double s = dot(sub(x0, r.seg->a), u);
        if (s <= kLineTol || s >= len - kLineTol) continue;
        const P2 p = add(r.seg->a, scale(u, s));
        const P2 v = scale(sub(x0, p), 2.0);
        const double gg = dot(r.grad, r.grad);
        if (gg == 0.0) continue;
        const double lam = dot(v, r.grad) / (a * gg);
        if (lam < 0.0 || lam > 1.0 + 1e-12) continue;
        const double res = norm(sub(v, scale(r.grad, a * lam)));
        if (res > kAnalyticResidualTol) continue;
        push({p, {r.seg->cell}, {r.grad}, {std::min(lam, 1.0)}, res});
    }

    // Segment end points: junctions of several cells.
    std::vector<P2> grads;
    std::vector<std::size_t> cells;
    for (const RelevantSegment& r : rel) {
        for (const P2& p : {r.seg->a, r.seg->b}) {
            gather_gradients(rel, p, kPointTol, grads, cells);
            const ConeFit fit = fit_cone(scale(sub(x0, p), 2.0), a, grads);
            if (fit.residual > kAnalyticResidualTol) continue;
            push({p, cells, grads, fit.multipliers, fit.residual});
        }
    }
    return certs;
}

std::optional<StationaryCertificate> stationary_point_near(const PolytopeMap& pmap,
                                                           const MlpModel& model, const P2& x0,
                                                           double a, std::optional<P2> reference) {
    const P2 ref = reference.value_or(x0);
    auto certs = stationary_points(pmap, model, x0, a);
    if (certs.empty()) return std::nullopt;
    auto it = std::min_element(certs.begin(), certs.end(), [&](const auto& l, const auto& r) {
        return dist(l.point, ref) < dist(r.point, ref);
    });
    return *it;
}

std::optional<StationaryCertificate> stationary_point_grid(const PolytopeMap& pmap,
                                                           const MlpModel& model, const P2& x0,
                                                           double a, std::optional<P2> reference,
                                                           double resolution) {
    if (!(a > 0.0)) throw std::invalid_argument("stationary point search needs a > 0");
    const int t = start_class(model, x0);
    const P2 ref = reference.value_or(x0);
    const auto minima = grid_minima(pmap, x0, a, t, resolution, 1e-4 * a, std::nullopt, 0.0);
    if (minima.empty()) return std::nullopt;
    auto it = std::min_element(minima.begin(), minima.end(), [&](const auto& l, const auto& r) {
        return dist(l.point, ref) < dist(r.point, ref);
    });
    return StationaryCertificate{it->point, it->cells, it->grads, it->multipliers, it->residual};
}

bool ball_eligibility(const PolytopeMap& pmap, const P2& x_star, double eps) {
    const double r = 3.0 * eps;
    if (x_star[0] - r < 0.0 || x_star[0] + r > 1.0 || x_star[1] - r < 0.0 || x_star[1] + r > 1.0) {
        return false;
    }
    // The cells tile the square, so the disk is covered by the cells holding
    // x* exactly when no other cell reaches into its interior.
    for (const Cell& cell : pmap.cells) {
        const double d = point_polygon_distance(x_star, cell.vertices);
        if (d <= kPointTol) continue;
        if (d < r) return false;
    }
    return true;
}

bool verify_theorem2(std::span<const Vec> iterates, const P2& x_star, double eps) {
    const double r = 3.0 * eps;
    return std::all_of(iterates.begin(), iterates.end(), [&](const Vec& x) {
        return std::hypot(x.at(0) - x_star[0], x.at(1) - x_star[1]) <= r;
    });
}

bool isolation_check(const PolytopeMap& pmap, const MlpModel& model, const P2& x0, double a,
                     const P2& x_star, double radius) {
    if (!(a > 0.0)) throw std::invalid_argument("isolation check needs a > 0");
    const int t = start_class(model, x0);
    const double h = kGridResolution;
    const auto minima = grid_minima(pmap, x0, a, t, h, 1e-4 * a, x_star, radius);
    const double exclusion = 5.0 * h;
    return std::none_of(minima.begin(), minima.end(),
                        [&](const GridCandidate& g) { return dist(g.point, x_star) > exclusion; });
}

std::string region_json(const PolytopeMap& pmap) {
    nlohmann::ordered_json j;
    j["cells"] = nlohmann::ordered_json::array();
    for (const Cell& cell : pmap.cells) {
        nlohmann::ordered_json cj;
        cj["pattern"] = cell.pattern;
        nlohmann::ordered_json verts = nlohmann::ordered_json::array();
        for (const P2& v : cell.vertices) verts.push_back({v[0], v[1]});
        cj["vertices"] = std::move(verts);
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < pmap.classes; ++k) rows.push_back({cell.A[2 * k], cell.A[2 * k + 1]});
        cj["A"] = std::move(rows);
        cj["beta"] = cell.beta;
        j["cells"].push_back(std::move(cj));
    }
    j["boundary"] = nlohmann::ordered_json::array();
    for (const BoundarySegment& s : pmap.boundary) {
        nlohmann::ordered_json sj;
        sj["a"] = {s.a[0], s.a[1]};
        sj["b"] = {s.b[0], s.b[1]};
        sj["cell"] = s.cell;
        sj["classes"] = {s.class_i, s.class_j};
        j["boundary"].push_back(std::move(sj));
    }
    j["c"] = pmap.grad_min;
    j["C"] = pmap.grad_max;
    return j.dump(1) + "\n";
}

}  // namespace cwlab::poly
