#pragma once

// Linear least-squares estimation of a section's (lambda, gamma, beta, delta)
// with the arc-length correspondence B(|C_{t,s}|) ~ C(s).

#include <silvec/errors.hpp>
#include <silvec/geometry.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace silvec {

struct FitSample {
  double offset;  // arc length from the section start
  Point2 point;
};

// Curve samples of the section [t, t + L] (cyclic), both end points included.
inline std::vector<FitSample> section_samples(const ClosedCurve& curve, double t, double L) {
  const std::size_t m = curve.size();
  const double tw = curve.wrap(t);
  std::vector<FitSample> out;
  out.push_back({0.0, curve.point_at(tw)});
  std::size_t j = (curve.edge_at(tw) + 1) % m;
  double off = (j == 0 ? curve.total_length() : curve.cum_length(j)) - tw;
  while (off < L) {
    out.push_back({off, curve.sample(j)});
    off += curve.edge_length(j);
    j = (j + 1) % m;
  }
  out.push_back({L, curve.point_at(tw + L)});
  return out;
}

namespace detail {

// Design columns of B(u) - x_n (b0 + b1) - x_{n+1} (b2 + b3) for the four
// parameters at one sample.
inline std::array<Point2, 4> fit_columns(double u, double L, Point2 ta, Point2 tb) noexcept {
  const double v = 1.0 - u;
  const double b1 = 3.0 * v * v * u, b2 = 3.0 * v * u * u;
  return {L * b1 * ta, L * b1 * perp(ta), -L * b2 * tb, -L * b2 * perp(tb)};
}

}  // namespace detail

// Discretized Q: sum over section samples of |B(offset) - C(s)|^2.
inline double quadratic_error(const ClosedCurve& curve, const BezierSegment& seg, const Node& start, const Node& end) {
  const CubicBezier c = control_points(seg, start, end);
  double q = 0.0;
  for (const auto& s : section_samples(curve, start.t, seg.L)) {
    const Point2 r = c.eval(s.offset / seg.L) - s.point;
    q += dot(r, r);
  }
  return q;
}

// Least squares over the free parameters for samples matched to B(offset / L)
// on the section from x0 to x1; fixed parameters are 0.
inline BezierSegment fit_section(const std::vector<FitSample>& samples, double L, Point2 x0, Point2 x1, double alpha,
                                 double alpha2, bool fix_gamma, bool fix_delta, std::size_t segment_id = 0) {
  if (!(L > 0.0)) throw FitError(segment_id, "section length must be positive");
  const Point2 ta = unit_vector(alpha), tb = unit_vector(alpha2);

  std::array<int, 4> free{};
  int k = 0;
  for (int p = 0; p < 4; ++p)
    if (!((p == 1 && fix_gamma) || (p == 3 && fix_delta))) free[k++] = p;

  double A[4][4] = {};
  double rhs[4] = {};
  for (const auto& s : samples) {
    const double u = s.offset / L;
    const double v = 1.0 - u;
    const Point2 base = (v * v * v + 3.0 * v * v * u) * x0 + (3.0 * v * u * u + u * u * u) * x1;
    const Point2 r = s.point - base;
    const auto cols = detail::fit_columns(u, L, ta, tb);
    for (int i = 0; i < k; ++i) {
      rhs[i] += dot(cols[free[i]], r);
      for (int j = 0; j <= i; ++j) A[i][j] += dot(cols[free[i]], cols[free[j]]);
    }
  }

  // Cholesky A = G G^T, lower triangle in place.
  double lead = 0.0;
  for (int j = 0; j < k; ++j) {
    double d = A[j][j];
    for (int p = 0; p < j; ++p) d -= A[j][p] * A[j][p];
    if (j == 0) lead = d;
    if (!(lead > 0.0) || !(d > 1e-12 * lead))
      throw FitError(segment_id, "singular normal equations (" + std::to_string(samples.size()) + " samples)");
    A[j][j] = std::sqrt(d);
    for (int i = j + 1; i < k; ++i) {
      double s = A[i][j];
      for (int p = 0; p < j; ++p) s -= A[i][p] * A[j][p];
      A[i][j] = s / A[j][j];
    }
  }
  double y[4] = {}, x[4] = {};
  for (int i = 0; i < k; ++i) {
    double s = rhs[i];
    for (int p = 0; p < i; ++p) s -= A[i][p] * y[p];
    y[i] = s / A[i][i];
  }
  for (int i = k - 1; i >= 0; --i) {
    double s = y[i];
    for (int p = i + 1; p < k; ++p) s -= A[p][i] * x[p];
    x[i] = s / A[i][i];
  }

  std::array<double, 4> params{};
  for (int i = 0; i < k; ++i) params[free[i]] = x[i];
  BezierSegment seg;
  seg.set_params(params);
  seg.L = L;
  return seg;
}

// Minimizes the discretized Q of the curve section [t, t2] over the free parameters.
inline BezierSegment linear_fit(const ClosedCurve& curve, double t, double t2, double alpha, double alpha2,
                                bool fix_gamma, bool fix_delta, std::size_t segment_id = 0) {
  const double L = section_length(curve, t, t2);
  if (!(L > 0.0)) throw FitError(segment_id, "section length must be positive");
  return fit_section(section_samples(curve, t, L), L, curve.point_at(t), curve.point_at(t + L), alpha, alpha2,
                     fix_gamma, fix_delta, segment_id);
}

inline BezierSegment linear_fit(const ClosedCurve& curve, const Node& start, const Node& end, std::size_t segment_id = 0) {
  return linear_fit(curve, start.t, end.t, start.alpha, end.alpha, start.kind == NodeKind::Regular,
                    end.kind == NodeKind::Regular, segment_id);
}

// Refits every section with the constraints implied by its node kinds.
inline BezierChain fit_all(const ClosedCurve& curve, BezierChain chain) {
  chain.segments.resize(chain.nodes.size());
  for (std::size_t n = 0; n < chain.size(); ++n)
    chain.segments[n] = linear_fit(curve, chain.nodes[n], chain.nodes[chain.next(n)], n);
  return chain;
}

}  // namespace silvec
