#pragma once

// Core geometry: closed polylines parameterized by arc length, curve nodes,
// and cubic Bezier sections expressed in the tangent frames of their end nodes.

#include <silvec/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace silvec {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2& operator+=(Point2 o) noexcept { x += o.x; y += o.y; return *this; }
  constexpr Point2& operator-=(Point2 o) noexcept { x -= o.x; y -= o.y; return *this; }
  constexpr Point2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

  friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator-(Point2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator/(Point2 a, double s) noexcept { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Point2, Point2) noexcept = default;
};

constexpr double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) noexcept { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }
inline bool is_finite(Point2 p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

// Counter-clockwise quarter turn: T(a)^perp = (-sin a, cos a).
constexpr Point2 perp(Point2 v) noexcept { return {-v.y, v.x}; }

inline Point2 unit_vector(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

// Wraps an angle into [-pi, pi).
inline double normalize_angle(double a) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= std::numbers::pi;
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

// Smallest absolute difference between two angles, in [0, pi].
inline double angle_distance(double a, double b) noexcept {
  return std::abs(normalize_angle(a - b));
}

inline double degrees_to_radians(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

// A closed polyline C:[0,T] -> R^2 parameterized by arc length. Sample M-1
// connects back to sample 0.
class ClosedCurve {
public:
  ClosedCurve() = default;

  explicit ClosedCurve(std::vector<Point2> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 3) throw ParameterError("closed curve needs at least 3 samples");
    cum_.resize(samples_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!is_finite(samples_[i])) throw ParameterError("closed curve sample is not finite");
      cum_[i] = acc;
      const double len = distance(samples_[i], samples_[(i + 1) % samples_.size()]);
      if (!(len > 0.0)) throw ParameterError("closed curve has repeated consecutive samples");
      acc += len;
    }
    total_ = acc;
  }

  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const Point2> samples() const noexcept { return samples_; }
  Point2 sample(std::size_t i) const { return samples_[i]; }
  double cum_length(std::size_t i) const { return cum_[i]; }
  std::span<const double> cum_lengths() const noexcept { return cum_; }
  double total_length() const noexcept { return total_; }

  // Edge i joins sample i to sample (i+1) mod M.
  double edge_length(std::size_t i) const {
    return (i + 1 < cum_.size() ? cum_[i + 1] : total_) - cum_[i];
  }
  Point2 edge_start(std::size_t i) const { return samples_[i]; }
  Point2 edge_end(std::size_t i) const { return samples_[(i + 1) % samples_.size()]; }

  double wrap(double t) const noexcept {
    double r = std::fmod(t, total_);
    if (r < 0.0) r += total_;
    if (r >= total_) r = 0.0;
    return r;
  }

  // Index of the edge containing parameter t (wrapped).
  std::size_t edge_at(double t) const {
    const double w = wrap(t);
    auto it = std::upper_bound(cum_.begin(), cum_.end(), w);
    return static_cast<std::size_t>(std::distance(cum_.begin(), it)) - 1;
  }

  Point2 point_at(double t) const {
    const double w = wrap(t);
    const std::size_t i = edge_at(w);
    const double f = (w - cum_[i]) / edge_length(i);
    const Point2 a = edge_start(i);
    return a + f * (edge_end(i) - a);
  }

  // Arc length travelled forward (curve orientation) from t to t2.
  double length_between(double t, double t2) const noexcept {
    double d = wrap(t2) - wrap(t);
    if (d < 0.0) d += total_;
    return d;
  }

  // Shoelace area; positive for counter-clockwise loops in the (x, y) frame.
  double signed_area() const noexcept {
    double a = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) a += cross(edge_start(i), edge_end(i));
    return 0.5 * a;
  }

  // Uniformly re-sampled copy with spacing as close to `spacing` as an integer
  // sample count allows. Sample 0 is kept.
  ClosedCurve resampled(double spacing = 1.0) const {
    const auto count = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(total_ / spacing)));
    const double step = total_ / static_cast<double>(count);
    std::vector<Point2> pts;
    pts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) pts.push_back(point_at(static_cast<double>(k) * step));
    return ClosedCurve(std::move(pts));
  }

private:
  std::vector<Point2> samples_;
  std::vector<double> cum_;
  double total_ = 0.0;
};

// Orientation angle of the derivative of the Gaussian-smoothed curve at t.
// Periodic convolution over points re-sampled at ~1 px, kernel cut at 4 sigma.
inline double smoothed_tangent_angle(const ClosedCurve& curve, double t, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  const double total = curve.total_length();
  const double step = total / std::max(1.0, std::round(total));
  const auto half = static_cast<long>(std::ceil(4.0 * sigma / step));
  // d/dt (C * G)(t) = sum_k C(t - u_k) G'(u_k) du with G'(u) = -u/sigma^2 G(u).
  Point2 d{};
  for (long k = -half; k <= half; ++k) {
    const double u = static_cast<double>(k) * step;
    const double g = std::exp(-0.5 * u * u / (sigma * sigma));
    const double dg = -u / (sigma * sigma) * g;
    d += dg * curve.point_at(t - u);
  }
  return normalize_angle(std::atan2(d.y, d.x));
}

enum class NodeKind { Corner, Regular };

struct Node {
  double t = 0.0;
  Point2 position;
  double alpha = 0.0;
  NodeKind kind = NodeKind::Corner;

  bool is_corner() const noexcept { return kind == NodeKind::Corner; }
};

inline Node make_node(const ClosedCurve& curve, double t, double alpha, NodeKind kind) {
  const double w = curve.wrap(t);
  return Node{w, curve.point_at(w), normalize_angle(alpha), kind};
}

// A cubic section in the local frames of its end nodes:
//   P1 = x_n     + lambda L T(a_n)     + gamma L T(a_n)^perp
//   P2 = x_{n+1} - beta   L T(a_{n+1}) - delta L T(a_{n+1})^perp
struct BezierSegment {
  double lambda = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double L = 1.0;

  std::array<double, 4> params() const noexcept { return {lambda, gamma, beta, delta}; }
  void set_params(const std::array<double, 4>& p) noexcept {
    lambda = p[0]; gamma = p[1]; beta = p[2]; delta = p[3];
  }
};

// Plain cubic in Bernstein form over u in [0, 1].
struct CubicBezier {
  std::array<Point2, 4> p;

  Point2 eval(double u) const noexcept {
    const double v = 1.0 - u;
    const double b0 = v * v * v, b1 = 3.0 * v * v * u, b2 = 3.0 * v * u * u, b3 = u * u * u;
    return b0 * p[0] + b1 * p[1] + b2 * p[2] + b3 * p[3];
  }

  // dB/du
  Point2 derivative(double u) const noexcept {
    const double v = 1.0 - u;
    return 3.0 * v * v * (p[1] - p[0]) + 6.0 * v * u * (p[2] - p[1]) + 3.0 * u * u * (p[3] - p[2]);
  }

  std::pair<CubicBezier, CubicBezier> split(double u) const noexcept {
    const Point2 a = p[0] + u * (p[1] - p[0]);
    const Point2 b = p[1] + u * (p[2] - p[1]);
    const Point2 c = p[2] + u * (p[3] - p[2]);
    const Point2 ab = a + u * (b - a);
    const Point2 bc = b + u * (c - b);
    const Point2 m = ab + u * (bc - ab);
    return {CubicBezier{{p[0], a, ab, m}}, CubicBezier{{m, bc, c, p[3]}}};
  }
};

inline CubicBezier control_points(const BezierSegment& seg, const Node& start, const Node& end) noexcept {
  const Point2 ta = unit_vector(start.alpha);
  const Point2 tb = unit_vector(end.alpha);
  const double L = seg.L;
  return CubicBezier{{start.position,
                      start.position + seg.lambda * L * ta + seg.gamma * L * perp(ta),
                      end.position - seg.beta * L * tb - seg.delta * L * perp(tb),
                      end.position}};
}

// Inverse of control_points: (lambda, gamma, beta, delta) for the given cubic.
inline std::array<double, 4> from_control_points(const CubicBezier& c, double alpha, double alpha_end, double L) {
  if (!(L > 0.0)) throw std::domain_error("section length must be positive");
  const Point2 ta = unit_vector(alpha);
  const Point2 tb = unit_vector(alpha_end);
  const Point2 h0 = c.p[1] - c.p[0];
  const Point2 h1 = c.p[3] - c.p[2];
  return {dot(h0, ta) / L, dot(h0, perp(ta)) / L, dot(h1, tb) / L, dot(h1, perp(tb)) / L};
}

// B(s) for s in [0, L].
inline Point2 eval_bezier(const BezierSegment& seg, const Node& start, const Node& end, double s) {
  if (!(s >= 0.0 && s <= seg.L)) throw std::domain_error("arc parameter outside [0, L]");
  if (s == 0.0) return start.position;
  if (s == seg.L) return end.position;
  return control_points(seg, start, end).eval(s / seg.L);
}

// B'(s) = (1/L) dB/du.
inline Point2 eval_bezier_derivative(const BezierSegment& seg, const Node& start, const Node& end, double s) {
  if (!(s >= 0.0 && s <= seg.L)) throw std::domain_error("arc parameter outside [0, L]");
  return control_points(seg, start, end).derivative(s / seg.L) / seg.L;
}

// The vectorization of one closed curve: segment n joins node n to node n+1 mod N.
struct BezierChain {
  std::vector<Node> nodes;
  std::vector<BezierSegment> segments;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t next(std::size_t n) const noexcept { return (n + 1) % nodes.size(); }
  std::size_t prev(std::size_t n) const noexcept { return (n + nodes.size() - 1) % nodes.size(); }

  CubicBezier cubic(std::size_t n) const { return control_points(segments[n], nodes[n], nodes[next(n)]); }
};

// Arc length of C between t and t2 for a section; a lone node spans the full loop.
inline double section_length(const ClosedCurve& curve, double t, double t2) noexcept {
  const double d = curve.length_between(t, t2);
  return d > 0.0 ? d : curve.total_length();
}

inline double section_length(const ClosedCurve& curve, const BezierChain& chain, std::size_t n) {
  return section_length(curve, chain.nodes[n].t, chain.nodes[chain.next(n)].t);
}

// True when node parameters go strictly once around the curve in order.
inline bool is_cyclic_increasing(const ClosedCurve& curve, const BezierChain& chain) {
  const std::size_t n = chain.size();
  if (n == 0) return false;
  if (n == 1) return true;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = curve.length_between(chain.nodes[i].t, chain.nodes[chain.next(i)].t);
    if (!(d > 0.0)) return false;
    sum += d;
  }
  return std::abs(sum - curve.total_length()) <= 1e-9 * std::max(1.0, curve.total_length());
}

// Regular nodes need gamma = 0 on the outgoing segment and delta = 0 on the incoming one.
inline bool satisfies_regular_constraints(const BezierChain& chain) noexcept {
  for (std::size_t n = 0; n < chain.size(); ++n) {
    if (chain.nodes[n].kind != NodeKind::Regular) continue;
    if (chain.segments[n].gamma != 0.0 || chain.segments[chain.prev(n)].delta != 0.0) return false;
  }
  return true;
}

inline void validate_chain(const ClosedCurve& curve, const BezierChain& chain) {
  if (chain.nodes.empty()) throw ParameterError("chain has no nodes");
  if (chain.nodes.size() != chain.segments.size()) throw ParameterError("chain node/segment count mismatch");
  if (!is_cyclic_increasing(curve, chain)) throw ParameterError("chain nodes are not cyclically increasing");
  for (const auto& s : chain.segments)
    if (!(s.L > 0.0)) throw ParameterError("chain segment has non-positive length");
  if (!satisfies_regular_constraints(chain)) throw ParameterError("regular node with non-zero normal parameter");
}

}  // namespace silvec
