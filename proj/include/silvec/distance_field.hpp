#pragma once

// Exact point-to-polyline distance with a uniform grid accelerator.

#include <silvec/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace silvec {

struct NearestPoint {
  Point2 point;
  double t = 0.0;     // arc-length parameter on the indexed curve
  double dist = 0.0;
};

struct EdgeProjection {
  Point2 point;
  double fraction = 0.0;
  double dist = 0.0;
};

// Closest point of segment [a, b] to p.
inline EdgeProjection project_to_edge(Point2 p, Point2 a, Point2 b) noexcept {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double f = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  f = std::clamp(f, 0.0, 1.0);
  const Point2 q = a + f * ab;
  return {q, f, distance(p, q)};
}

class CurveIndex {
public:
  static constexpr double default_cell = 8.0;
  static constexpr double gradient_epsilon = 1e-8;

  CurveIndex() = default;

  explicit CurveIndex(const ClosedCurve& curve, double cell = default_cell) : cell_(cell) {
    if (!(cell > 0.0)) throw ParameterError("index cell size must be positive");
    const std::size_t m = curve.size();
    edges_.reserve(m);
    min_ = max_ = curve.sample(0);
    for (std::size_t i = 0; i < m; ++i) {
      edges_.push_back({curve.edge_start(i), curve.edge_end(i), curve.cum_length(i), curve.edge_length(i)});
      const Point2 p = curve.sample(i);
      min_ = {std::min(min_.x, p.x), std::min(min_.y, p.y)};
      max_ = {std::max(max_.x, p.x), std::max(max_.y, p.y)};
    }
    total_ = curve.total_length();
    nx_ = std::max(1, static_cast<int>(std::ceil((max_.x - min_.x) / cell_)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((max_.y - min_.y) / cell_)) + 1);

    // Counting sort of edge ids into cells touched by each dilated edge box.
    constexpr double pad = 1e-9;
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    auto each_cell = [&](const Edge& e, auto&& fn) {
      const int x0 = cell_x(std::min(e.a.x, e.b.x) - pad), x1 = cell_x(std::max(e.a.x, e.b.x) + pad);
      const int y0 = cell_y(std::min(e.a.y, e.b.y) - pad), y1 = cell_y(std::max(e.a.y, e.b.y) + pad);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) fn(static_cast<std::size_t>(y) * nx_ + x);
    };
    for (const auto& e : edges_) each_cell(e, [&](std::size_t c) { ++counts[c + 1]; });
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    offsets_ = counts;
    packed_.resize(counts.back());
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      const Point2 ab = e.b - e.a;
      const PackedEdge pe{e.a, ab, 1.0 / dot(ab, ab), e.t0, e.len, i};
      each_cell(e, [&](std::size_t c) { packed_[counts[c]++] = pe; });
    }
  }

  double cell_size() const noexcept { return cell_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  double distance(Point2 p) const { return query(p).dist; }

  NearestPoint nearest(Point2 p) const {
    const Hit h = query(p);
    const Edge& e = edges_[h.edge];
    double t = e.t0 + h.fraction * e.len;
    if (t >= total_) t -= total_;
    return {e.a + h.fraction * (e.b - e.a), t, h.dist};
  }

  // Unit vector pointing away from the nearest curve point; empty on (or within
  // gradient_epsilon of) the curve.
  std::optional<Point2> gradient(Point2 p) const {
    const NearestPoint np = nearest(p);
    const Point2 d = p - np.point;
    const double len = norm(d);
    if (!(len > gradient_epsilon)) return std::nullopt;
    return d / len;
  }

  // Reference answer: minimum over every edge.
  double brute_force_distance(Point2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : edges_) best = std::min(best, project_to_edge(p, e.a, e.b).dist);
    return best;
  }

private:
  struct Edge {
    Point2 a, b;
    double t0;
    double len;
  };
  struct Hit {
    std::size_t edge = 0;
    double fraction = 0.0;
    double d2 = std::numeric_limits<double>::infinity();
    double t = std::numeric_limits<double>::infinity();
    double dist = std::numeric_limits<double>::infinity();
  };

  int cell_x(double x) const noexcept {
    return std::clamp(static_cast<int>(std::floor((x - min_.x) / cell_)), 0, nx_ - 1);
  }
  int cell_y(double y) const noexcept {
    return std::clamp(static_cast<int>(std::floor((y - min_.y) / cell_)), 0, ny_ - 1);
  }

  // Edge copy stored per cell, so a cell scan reads contiguous memory.
  struct PackedEdge {
    Point2 a;
    Point2 ab;
    double inv_len2;
    double t0;
    double len;
    std::uint32_t id;
  };

  void scan_cell(std::size_t c, Point2 p, Hit& best) const {
    for (std::uint32_t k = offsets_[c]; k < offsets_[c + 1]; ++k) {
      const PackedEdge& e = packed_[k];
      const Point2 ap = p - e.a;
      const double f = std::clamp(dot(ap, e.ab) * e.inv_len2, 0.0, 1.0);
      const Point2 r = ap - f * e.ab;
      const double d2 = dot(r, r);
      if (d2 > best.d2) continue;
      const double t = e.t0 + f * e.len;
      // Equal distances resolve to the smaller curve parameter.
      if (d2 < best.d2 || t < best.t) best = {e.id, f, d2, t};
    }
  }

  Hit query(Point2 p) const {
    // Unclamped cell coordinates of p; rings grow around it until the nearest
    // unvisited cell is provably farther than the best edge found. Cells whose
    // rectangle lies farther than the best hit are skipped.
    const double fx = (p.x - min_.x) / cell_, fy = (p.y - min_.y) / cell_;
    const long px = static_cast<long>(std::floor(fx)), py = static_cast<long>(std::floor(fy));
    const long gap_x = px < 0 ? -px : (px >= nx_ ? px - (nx_ - 1) : 0);
    const long gap_y = py < 0 ? -py : (py >= ny_ ? py - (ny_ - 1) : 0);
    const long reach = std::max({px, nx_ - 1 - px, py, ny_ - 1 - py, 0L});
    Hit best;
    auto visit = [&](long x, long y) {
      if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return;
      const double gx = std::max({static_cast<double>(x) - fx, fx - static_cast<double>(x + 1), 0.0});
      const double gy = std::max({static_cast<double>(y) - fy, fy - static_cast<double>(y + 1), 0.0});
      if ((gx * gx + gy * gy) * cell_ * cell_ > best.d2) return;
      scan_cell(static_cast<std::size_t>(y) * nx_ + static_cast<std::size_t>(x), p, best);
    };
    for (long k = std::max(gap_x, gap_y); k <= reach + 1; ++k) {
      const long x0 = px - k, x1 = px + k, y0 = py - k, y1 = py + k;
      if (k == 0) {
        visit(px, py);
      } else {
        for (long x = x0; x <= x1; ++x) { visit(x, y0); visit(x, y1); }
        for (long y = y0 + 1; y < y1; ++y) { visit(x0, y); visit(x1, y); }
      }
      // Any cell outside the (2k+1)^2 block is at least this far from p.
      const double bound = std::min({fx - static_cast<double>(x0), static_cast<double>(x1 + 1) - fx,
                                     fy - static_cast<double>(y0), static_cast<double>(y1 + 1) - fy}) * cell_;
      if (best.d2 < bound * bound) break;
    }
    best.dist = std::sqrt(best.d2);
    return best;
  }

  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<PackedEdge> packed_;
  Point2 min_{}, max_{};
  double cell_ = default_cell;
  double total_ = 0.0;
  int nx_ = 1, ny_ = 1;
};

}  // namespace silvec
