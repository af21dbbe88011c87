#pragma once

// Refinement of a Bezier chain by minimizing the weighted-length energy
//
//   E = sum_n  integral_0^{L_n} (d_C(B_n(s)) + w_n) |B_n'(s)| ds
//
// alternating descent on each section's (lambda, gamma, beta, delta) with a
// local grid search over each node's curve parameter t_n and tangent angle.

#include <silvec/bezier_fit.hpp>
#include <silvec/distance_field.hpp>
#include <silvec/geometry.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

namespace silvec {

struct DescentParams {
  int max_iters = 200;
  double fd_step = 1e-4;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double init_step = 1e-2;  // first trial step along the unit descent direction
  double min_step = 1e-12;
};

struct RefineParams {
  double w_default = 0.0;
  std::map<std::size_t, double> w_overrides;  // segment index -> weight
  double r_t = 2.0;            // px
  double r_alpha = 4.0;        // degrees
  double alpha_step = 1.0;     // degrees
  double t_step = 1.0;         // px
  double stop_rel = 1e-3;
  int max_sweeps = 50;
  int candidate_iters = 20;    // descent cap when scoring a grid candidate
  DescentParams descent;

  double weight(std::size_t segment) const {
    auto it = w_overrides.find(segment);
    return it == w_overrides.end() ? w_default : it->second;
  }

  void validate() const {
    if (!(r_t > 0.0) || !(r_alpha > 0.0) || !(alpha_step > 0.0) || !(t_step > 0.0))
      throw ParameterError("search radii and steps must be positive");
    if (!(stop_rel >= 0.0 && stop_rel < 1.0)) throw ParameterError("stop_rel must be in [0, 1)");
    if (max_sweeps < 1) throw ParameterError("max_sweeps must be at least 1");
    if (w_default < 0.0) throw ParameterError("weights must be non-negative");
    for (const auto& [k, w] : w_overrides)
      if (w < 0.0) throw ParameterError("weights must be non-negative");
  }
};

inline std::size_t quadrature_intervals(double L) noexcept {
  return std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(L)));
}

// Composite midpoint rule over max(32, ceil(L)) sub-intervals of u in [0, 1].
inline double cubic_energy(const CurveIndex& index, const CubicBezier& c, double w, std::size_t intervals) {
  const double du = 1.0 / static_cast<double>(intervals);
  double e = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) {
    const double u = (static_cast<double>(k) + 0.5) * du;
    e += (index.distance(c.eval(u)) + w) * norm(c.derivative(u));
  }
  return e * du;
}

inline double cubic_length(const CubicBezier& c, std::size_t intervals) {
  const double du = 1.0 / static_cast<double>(intervals);
  double len = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) len += norm(c.derivative((static_cast<double>(k) + 0.5) * du));
  return len * du;
}

inline double segment_energy(const CurveIndex& index, const BezierSegment& seg, const Node& start, const Node& end,
                             double w) {
  return cubic_energy(index, control_points(seg, start, end), w, quadrature_intervals(seg.L));
}

inline double segment_length(const BezierSegment& seg, const Node& start, const Node& end) {
  return cubic_length(control_points(seg, start, end), quadrature_intervals(seg.L));
}

inline double total_energy(const CurveIndex& index, const BezierChain& chain, const RefineParams& params) {
  double e = 0.0;
  for (std::size_t n = 0; n < chain.size(); ++n)
    e += segment_energy(index, chain.segments[n], chain.nodes[n], chain.nodes[chain.next(n)], params.weight(n));
  return e;
}

struct DescentStats {
  int iterations = 0;
  int accepted = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  // Accepted steps whose direction did not point downhill (g . d >= 0); must stay 0.
  int uphill_accepted = 0;
};

// Gradient descent with Armijo backtracking on the free parameters. The
// gradient is a central finite difference of segment_energy. The step length
// doubles after each accepted step. Never returns a higher energy than it got.
inline BezierSegment refine_segment(const CurveIndex& index, const BezierSegment& seg, const Node& start,
                                    const Node& end, double w, const DescentParams& dp,
                                    DescentStats* stats = nullptr) {
  std::array<int, 4> free{};
  int k = 0;
  free[k++] = 0;
  if (start.is_corner()) free[k++] = 1;
  free[k++] = 2;
  if (end.is_corner()) free[k++] = 3;

  BezierSegment cur = seg;
  BezierSegment trial = seg;
  auto energy_at = [&](const std::array<double, 4>& p) {
    trial.set_params(p);
    return segment_energy(index, trial, start, end, w);
  };

  std::array<double, 4> x = cur.params();
  double e = energy_at(x);
  if (stats) *stats = DescentStats{0, 0, e, e, 0};
  double step = dp.init_step;
  for (int it = 0; it < dp.max_iters; ++it) {
    if (stats) ++stats->iterations;
    std::array<double, 4> g{};
    double gnorm2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const int p = free[i];
      auto xp = x, xm = x;
      xp[p] += dp.fd_step;
      xm[p] -= dp.fd_step;
      g[p] = (energy_at(xp) - energy_at(xm)) / (2.0 * dp.fd_step);
      gnorm2 += g[p] * g[p];
    }
    const double gnorm = std::sqrt(gnorm2);
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;

    bool accepted = false;
    std::array<double, 4> xn{};
    double en = e;
    for (double s = step; s >= dp.min_step; s *= dp.backtrack) {
      xn = x;
      for (int i = 0; i < k; ++i) xn[free[i]] -= s * g[free[i]] / gnorm;
      en = energy_at(xn);
      if (en <= e - dp.armijo_c * s * gnorm && en < e) {
        accepted = true;
        step = std::min(2.0 * s, 1.0);
        break;
      }
    }
    if (!accepted) break;
    if (stats) {
      ++stats->accepted;
      double gd = 0.0;
      for (int i = 0; i < k; ++i) gd += g[free[i]] * (xn[free[i]] - x[free[i]]);
      if (gd >= 0.0) ++stats->uphill_accepted;
    }
    const double gain = e - en;
    x = xn;
    e = en;
    if (gain <= 1e-13 * e) break;
  }
  cur.set_params(x);
  if (stats) stats->final_energy = e;
  return cur;
}

namespace detail {

struct NodeCandidate {
  double energy = std::numeric_limits<double>::infinity();
  Node node;
  BezierSegment incoming;  // segment prev -> n
  BezierSegment outgoing;  // segment n -> next
};

inline bool is_current(const Node& node, double t, double alpha) noexcept {
  return t == node.t && alpha == node.alpha;
}

inline NodeCandidate current_candidate(const CurveIndex& index, const BezierChain& chain, std::size_t n,
                                       const RefineParams& params) {
  const std::size_t p = chain.prev(n), q = chain.next(n);
  NodeCandidate c{0.0, chain.nodes[n], chain.segments[p], chain.segments[n]};
  c.energy = segment_energy(index, chain.segments[n], chain.nodes[n], chain.nodes[q], params.weight(n));
  if (p != n)
    c.energy += segment_energy(index, chain.segments[p], chain.nodes[p], chain.nodes[n], params.weight(p));
  return c;
}

// Moves node n to (t, alpha) and re-minimizes both adjacent sections: linear
// fit followed by at most `iters` descent iterations.
inline NodeCandidate evaluate_candidate(const ClosedCurve& curve, const CurveIndex& index, const BezierChain& chain,
                                        std::size_t n, double t, double alpha, const RefineParams& params, int iters) {
  if (is_current(chain.nodes[n], t, alpha)) return current_candidate(index, chain, n, params);
  const std::size_t p = chain.prev(n), q = chain.next(n);
  NodeCandidate c;
  c.node = make_node(curve, t, alpha, chain.nodes[n].kind);
  if (chain.size() > 1) {
    const double a = curve.length_between(chain.nodes[p].t, c.node.t);
    const double b = curve.length_between(c.node.t, chain.nodes[q].t);
    const double span = section_length(curve, chain.nodes[p].t, chain.nodes[q].t);
    if (!(a > 0.0) || !(b > 0.0) || std::abs(a + b - span) > 1e-9 * curve.total_length()) return c;
  }
  DescentParams dp = params.descent;
  dp.max_iters = iters;
  try {
    const Node& next_node = q == n ? c.node : chain.nodes[q];
    c.outgoing = refine_segment(index, linear_fit(curve, c.node, next_node, n), c.node, next_node, params.weight(n), dp);
    c.energy = segment_energy(index, c.outgoing, c.node, next_node, params.weight(n));
    if (p != n) {
      c.incoming = refine_segment(index, linear_fit(curve, chain.nodes[p], c.node, p), chain.nodes[p], c.node,
                                  params.weight(p), dp);
      c.energy += segment_energy(index, c.incoming, chain.nodes[p], c.node, params.weight(p));
    } else {
      c.incoming = c.outgoing;
    }
  } catch (const FitError&) {
    c.energy = std::numeric_limits<double>::infinity();
  }
  return c;
}

}  // namespace detail

// E_n(t, alpha): summed energy of the two sections adjacent to node n after
// re-minimizing them for the candidate. The current (t_n, alpha_n) scores the
// chain as it stands; candidates that reach or pass a neighbor score +inf.
inline double node_objective(const ClosedCurve& curve, const CurveIndex& index, const BezierChain& chain,
                             std::size_t n, double t, double alpha, const RefineParams& params = {}) {
  return detail::evaluate_candidate(curve, index, chain, n, t, alpha, params, params.candidate_iters).energy;
}

struct GridOffset {
  int dt;
  int dalpha;
};

// Candidate offsets ordered by |dt|, then |dalpha|; the current point comes first.
inline std::vector<GridOffset> grid_offsets(const RefineParams& params, bool corner) {
  const int nt = static_cast<int>(std::floor(params.r_t / params.t_step + 1e-9));
  const int na = corner ? 0 : static_cast<int>(std::floor(params.r_alpha / params.alpha_step + 1e-9));
  std::vector<GridOffset> g;
  for (int i = -nt; i <= nt; ++i)
    for (int j = -na; j <= na; ++j) g.push_back({i, j});
  std::stable_sort(g.begin(), g.end(), [](GridOffset a, GridOffset b) {
    if (std::abs(a.dt) != std::abs(b.dt)) return std::abs(a.dt) < std::abs(b.dt);
    return std::abs(a.dalpha) < std::abs(b.dalpha);
  });
  return g;
}

struct NodeUpdate {
  double energy_before = 0.0;
  double energy_after = 0.0;
  bool moved = false;
  std::size_t candidates = 0;
};

// Exhaustive search over the (t, alpha) window of node n; the winner's two
// sections are then polished with a full descent. Corners keep their angle.
inline NodeUpdate optimize_node(const ClosedCurve& curve, const CurveIndex& index, BezierChain& chain, std::size_t n,
                                const RefineParams& params) {
  const Node node = chain.nodes[n];
  const double alpha_step = degrees_to_radians(params.alpha_step);
  detail::NodeCandidate best = detail::current_candidate(index, chain, n, params);
  NodeUpdate upd{best.energy, best.energy, false, 0};
  for (const auto off : grid_offsets(params, node.is_corner())) {
    ++upd.candidates;
    if (off.dt == 0 && off.dalpha == 0) continue;
    const double t = curve.wrap(node.t + off.dt * params.t_step);
    const double alpha = normalize_angle(node.alpha + off.dalpha * alpha_step);
    auto c = detail::evaluate_candidate(curve, index, chain, n, t, alpha, params, params.candidate_iters);
    if (c.energy < best.energy) best = c;
  }
  if (detail::is_current(best.node, node.t, node.alpha)) return upd;

  const std::size_t p = chain.prev(n), q = chain.next(n);
  chain.nodes[n] = best.node;
  chain.segments[n] = refine_segment(index, best.outgoing, chain.nodes[n], chain.nodes[q], params.weight(n),
                                     params.descent);
  if (p != n)
    chain.segments[p] = refine_segment(index, best.incoming, chain.nodes[p], chain.nodes[n], params.weight(p),
                                       params.descent);
  upd.energy_after = detail::current_candidate(index, chain, n, params).energy;
  upd.moved = true;
  return upd;
}

// Full descent on every section with the nodes held fixed.
inline void refine_all_segments(const CurveIndex& index, BezierChain& chain, const RefineParams& params) {
  for (std::size_t n = 0; n < chain.size(); ++n)
    chain.segments[n] = refine_segment(index, chain.segments[n], chain.nodes[n], chain.nodes[chain.next(n)],
                                       params.weight(n), params.descent);
}

struct RefineResult {
  BezierChain chain;
  std::vector<double> trace;  // total energy before the first sweep and after each sweep
  int sweeps = 0;
};

// Sweeps of (section descent, node search for n = 0..N-1) until a sweep lowers
// the total energy by less than stop_rel relative, or max_sweeps is reached.
inline RefineResult run(const ClosedCurve& curve, const CurveIndex& index, BezierChain chain,
                        const RefineParams& params = {}) {
  params.validate();
  validate_chain(curve, chain);
  RefineResult r;
  r.trace.push_back(total_energy(index, chain, params));
  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    refine_all_segments(index, chain, params);
    for (std::size_t n = 0; n < chain.size(); ++n) optimize_node(curve, index, chain, n, params);
    ++r.sweeps;
    const double before = r.trace.back();
    const double after = total_energy(index, chain, params);
    r.trace.push_back(after);
    if (!(before > 0.0) || (before - after) / before < params.stop_rel) break;
  }
  r.chain = std::move(chain);
  return r;
}

inline RefineResult run(const ClosedCurve& curve, const BezierChain& chain, const RefineParams& params = {}) {
  return run(curve, CurveIndex(curve), chain, params);
}

}  // namespace silvec
