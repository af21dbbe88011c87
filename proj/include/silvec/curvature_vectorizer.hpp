#pragma once

// Baseline vectorization: corners from a chord-angle cornerness measure, then
// regular points inserted wherever the linear Bezier fit strays farther than
// max_dist from the curve.

#include <silvec/bezier_fit.hpp>
#include <silvec/distance_field.hpp>
#include <silvec/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace silvec {

struct VectorizerParams {
  double max_dist = 6.0;
  double min_length = 25.0;
  double sigma = 20.0;
  double kappa_min = 0.5;
  int seed_nodes = 2;  // regular nodes placed when no corner is found

  void validate() const {
    if (!(max_dist > 0.0) || !(min_length > 0.0) || !(sigma > 0.0) || !(kappa_min > 0.0))
      throw ParameterError("vectorizer parameters must be positive");
    if (kappa_min > 2.0) throw ParameterError("kappa_min must not exceed 2");
    if (seed_nodes < 1) throw ParameterError("seed_nodes must be at least 1");
  }
};

// Shorter of the two arc lengths separating t and t2.
inline double cyclic_separation(const ClosedCurve& curve, double t, double t2) noexcept {
  return std::min(curve.length_between(t, t2), curve.length_between(t2, t));
}

// cos(angle between the forward and backward sigma-chords) + 1, in [0, 2].
inline double cornerness(const ClosedCurve& curve, double t, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(curve.total_length() > 2.0 * sigma)) throw ParameterError("curve shorter than 2 sigma");
  const Point2 c = curve.point_at(t);
  const Point2 f = curve.point_at(t + sigma) - c;
  const Point2 b = curve.point_at(t - sigma) - c;
  const double nf = norm(f), nb = norm(b);
  if (!(nf > 0.0) || !(nb > 0.0)) return 0.0;
  return std::clamp(dot(f, b) / (nf * nb) + 1.0, 0.0, 2.0);
}

// Greedy corner selection over the curve samples: take the admissible maximum
// of cornerness, keep it if above kappa_min, then exclude its min_length
// neighborhood.
inline std::vector<Node> detect_corners(const ClosedCurve& curve, const VectorizerParams& params) {
  params.validate();
  const std::size_t m = curve.size();
  std::vector<double> kappa(m);
  for (std::size_t i = 0; i < m; ++i) kappa[i] = cornerness(curve, curve.cum_length(i), params.sigma);

  std::vector<bool> blocked(m, false);
  std::vector<Node> corners;
  for (;;) {
    std::size_t best = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!blocked[i] && (best == m || kappa[i] > kappa[best])) best = i;
    if (best == m || kappa[best] < params.kappa_min) break;
    const double t = curve.cum_length(best);
    corners.push_back(make_node(curve, t, smoothed_tangent_angle(curve, t, params.sigma), NodeKind::Corner));
    for (std::size_t i = 0; i < m; ++i)
      if (cyclic_separation(curve, t, curve.cum_length(i)) <= params.min_length) blocked[i] = true;
  }
  std::sort(corners.begin(), corners.end(), [](const Node& a, const Node& b) { return a.t < b.t; });
  return corners;
}

struct Deviation {
  double dist = 0.0;
  Point2 point;
  std::size_t segment = 0;
};

// Maximum of d_C over max(32, ceil(L)) + 1 evenly spaced points per section.
inline Deviation max_deviation(const CurveIndex& index, const BezierChain& chain) {
  Deviation worst{-1.0, {}, 0};
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const CubicBezier c = chain.cubic(n);
    const auto count = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(chain.segments[n].L)));
    for (std::size_t k = 0; k <= count; ++k) {
      const Point2 p = c.eval(static_cast<double>(k) / static_cast<double>(count));
      const double d = index.distance(p);
      if (d > worst.dist) worst = {d, p, n};
    }
  }
  return worst;
}

struct VectorizeResult {
  BezierChain chain;
  double max_deviation = 0.0;
  std::size_t regular_inserted = 0;
  // Set when the deviation still exceeds max_dist but no admissible parameter is left.
  bool max_dist_unreached = false;
};

inline BezierChain chain_from_nodes(std::vector<Node> nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.t < b.t; });
  BezierChain chain;
  chain.nodes = std::move(nodes);
  chain.segments.resize(chain.nodes.size());
  return chain;
}

inline VectorizeResult insert_regular_points(const ClosedCurve& curve, const CurveIndex& index, std::vector<Node> nodes,
                                             const VectorizerParams& params) {
  params.validate();
  if (nodes.empty()) throw ParameterError("regular point insertion needs at least one node");
  const double exclusion = 2.0 * params.min_length;
  VectorizeResult result;
  for (;;) {
    result.chain = fit_all(curve, chain_from_nodes(nodes));
    const Deviation worst = max_deviation(index, result.chain);
    result.max_deviation = worst.dist;
    if (worst.dist <= params.max_dist) break;

    std::size_t best = curve.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double t = curve.cum_length(i);
      bool admissible = true;
      for (const auto& nd : nodes)
        if (cyclic_separation(curve, t, nd.t) <= exclusion) { admissible = false; break; }
      if (!admissible) continue;
      const double d = distance(curve.sample(i), worst.point);
      if (d < best_d) { best_d = d; best = i; }
    }
    if (best == curve.size()) {
      result.max_dist_unreached = true;
      break;
    }
    const double t = curve.cum_length(best);
    nodes.push_back(make_node(curve, t, smoothed_tangent_angle(curve, t, params.sigma), NodeKind::Regular));
    ++result.regular_inserted;
  }
  return result;
}

inline VectorizeResult vectorize(const ClosedCurve& curve, const CurveIndex& index, const VectorizerParams& params) {
  params.validate();
  if (!(curve.total_length() > 2.0 * params.sigma)) throw ParameterError("curve shorter than 2 sigma");
  std::vector<Node> nodes = detect_corners(curve, params);
  if (nodes.empty()) {
    for (int k = 0; k < params.seed_nodes; ++k) {
      const double t = curve.total_length() * k / params.seed_nodes;
      nodes.push_back(make_node(curve, t, smoothed_tangent_angle(curve, t, params.sigma), NodeKind::Regular));
    }
  }
  return insert_regular_points(curve, index, std::move(nodes), params);
}

inline VectorizeResult vectorize(const ClosedCurve& curve, const VectorizerParams& params = {}) {
  return vectorize(curve, CurveIndex(curve), params);
}

}  // namespace silvec
