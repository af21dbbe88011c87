#pragma once

// Average distances between a Bezier chain B and its curve C, both ways:
//   d(B, C): length-weighted mean of d_C over the Bezier sections
//   d(C, B): arc-length-weighted mean of d_B over the curve samples

#include <silvec/active_contour.hpp>
#include <silvec/distance_field.hpp>
#include <silvec/geometry.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace silvec {

struct ChainMetrics {
  std::size_t nodes = 0;
  double d_B_to_C = 0.0;
  double d_C_to_B = 0.0;
  double bezier_length = 0.0;  // denominator of d(B, C)
  double curve_length = 0.0;   // denominator of d(C, B)
};

struct DistanceRatio {
  double weighted = 0.0;
  double length = 0.0;
  double value() const noexcept { return length > 0.0 ? weighted / length : 0.0; }
};

inline DistanceRatio chain_to_curve_parts(const CurveIndex& index, const BezierChain& chain,
                                          double density = 1.0) {
  DistanceRatio r;
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const CubicBezier c = chain.cubic(n);
    const auto m = static_cast<std::size_t>(std::ceil(density * static_cast<double>(quadrature_intervals(chain.segments[n].L))));
    r.weighted += cubic_energy(index, c, 0.0, m);
    r.length += cubic_length(c, m);
  }
  return r;
}

inline double dist_chain_to_curve(const CurveIndex& index, const BezierChain& chain) {
  return chain_to_curve_parts(index, chain).value();
}

namespace detail {

inline void flatten_cubic(const CubicBezier& c, double tol, int depth, std::vector<Point2>& out) {
  const Point2 chord = c.p[3] - c.p[0];
  const double len = norm(chord);
  auto off = [&](Point2 q) {
    return len > 0.0 ? std::abs(cross(chord, q - c.p[0])) / len : distance(q, c.p[0]);
  };
  // The curve stays within the control polygon's hull, so this bounds the chord error.
  if (depth >= 18 || std::max(off(c.p[1]), off(c.p[2])) <= tol) {
    out.push_back(c.p[3]);
    return;
  }
  const auto [a, b] = c.split(0.5);
  flatten_cubic(a, tol, depth + 1, out);
  flatten_cubic(b, tol, depth + 1, out);
}

}  // namespace detail

// Closed polyline within `tol` of every section; the first point is not repeated.
inline std::vector<Point2> flatten(const BezierChain& chain, double tol = 0.05) {
  std::vector<Point2> pts;
  if (chain.size() == 0) return pts;
  pts.push_back(chain.nodes[0].position);
  for (std::size_t n = 0; n < chain.size(); ++n) detail::flatten_cubic(chain.cubic(n), tol, 0, pts);
  pts.pop_back();  // closes onto pts[0]
  std::vector<Point2> unique;
  for (const auto& p : pts)
    if (unique.empty() || !(p == unique.back())) unique.push_back(p);
  while (unique.size() > 1 && unique.back() == unique.front()) unique.pop_back();
  return unique;
}

inline DistanceRatio curve_to_chain_parts(const ClosedCurve& curve, const BezierChain& chain, double tol = 0.05) {
  const auto poly = flatten(chain, tol);
  std::vector<double> d(curve.size());
  if (poly.size() >= 3) {
    const CurveIndex bindex{ClosedCurve(poly)};
    for (std::size_t i = 0; i < curve.size(); ++i) d[i] = bindex.distance(curve.sample(i));
  } else {
    // Degenerate chain: fall back to the raw vertices.
    for (std::size_t i = 0; i < curve.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < poly.size(); ++k)
        best = std::min(best, project_to_edge(curve.sample(i), poly[k], poly[(k + 1) % poly.size()]).dist);
      d[i] = best;
    }
  }
  DistanceRatio r;
  const std::size_t m = curve.size();
  for (std::size_t i = 0; i < m; ++i)
    r.weighted += d[i] * 0.5 * (curve.edge_length(i) + curve.edge_length((i + m - 1) % m));
  r.length = curve.total_length();
  return r;
}

inline double dist_curve_to_chain(const ClosedCurve& curve, const BezierChain& chain) {
  return curve_to_chain_parts(curve, chain).value();
}

inline ChainMetrics measure(const ClosedCurve& curve, const CurveIndex& index, const BezierChain& chain) {
  const auto bc = chain_to_curve_parts(index, chain);
  const auto cb = curve_to_chain_parts(curve, chain);
  return {chain.size(), bc.value(), cb.value(), bc.length, cb.length};
}

// Length-weighted combination over several Jordan curves.
inline ChainMetrics aggregate(const std::vector<ChainMetrics>& parts) {
  ChainMetrics out;
  double wb = 0.0, wc = 0.0;
  for (const auto& p : parts) {
    out.nodes += p.nodes;
    wb += p.d_B_to_C * p.bezier_length;
    wc += p.d_C_to_B * p.curve_length;
    out.bezier_length += p.bezier_length;
    out.curve_length += p.curve_length;
  }
  out.d_B_to_C = out.bezier_length > 0.0 ? wb / out.bezier_length : 0.0;
  out.d_C_to_B = out.curve_length > 0.0 ? wc / out.curve_length : 0.0;
  return out;
}

// 100 (after - before) / before; undefined when before is 0.
inline std::optional<double> variation_percent(double before, double after) {
  if (before == 0.0) return std::nullopt;
  return 100.0 * (after - before) / before;
}

struct MetricsReport {
  ChainMetrics before;
  std::optional<ChainMetrics> after;
  std::optional<double> variation_pct_B_to_C;
  std::optional<double> variation_pct_C_to_B;
};

inline MetricsReport compare(const ChainMetrics& before, const ChainMetrics& after) {
  return {before, after, variation_percent(before.d_B_to_C, after.d_B_to_C),
          variation_percent(before.d_C_to_B, after.d_C_to_B)};
}

inline MetricsReport compare(const ClosedCurve& curve, const CurveIndex& index, const BezierChain& before,
                             const BezierChain& after) {
  return compare(measure(curve, index, before), measure(curve, index, after));
}

inline MetricsReport compare(const ClosedCurve& curve, const BezierChain& before, const BezierChain& after) {
  return compare(curve, CurveIndex(curve), before, after);
}

inline nlohmann::ordered_json to_json(const ChainMetrics& m) {
  nlohmann::ordered_json j;
  j["nodes"] = m.nodes;
  j["d_B_to_C"] = m.d_B_to_C;
  j["d_C_to_B"] = m.d_C_to_B;
  return j;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  if (!r.after) return to_json(r.before);
  nlohmann::ordered_json j;
  j["nodes"] = r.after->nodes;
  j["before"] = to_json(r.before);
  j["after"] = to_json(*r.after);
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
  j["variation_pct_B_to_C"] = opt(r.variation_pct_B_to_C);
  j["variation_pct_C_to_B"] = opt(r.variation_pct_C_to_B);
  return j;
}

// One row per silhouette in the column layout
//   Silhouette | Nodes | d(B0,C) | d(Binf,C) | Var. Perc. | d(C,B0) | d(C,Binf) | Var. Perc.
inline std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", *v);
    return std::string(buf);
  };
  auto opt = [&](const std::optional<ChainMetrics>& m, bool bc) {
    return m ? num(bc ? m->d_B_to_C : m->d_C_to_B) : std::string("-");
  };
  std::vector<std::array<std::string, 8>> cells;
  cells.push_back({"Silhouette", "Nodes", "d(B0,C)", "d(Binf,C)", "Var. Perc.", "d(C,B0)", "d(C,Binf)", "Var. Perc."});
  for (const auto& [name, r] : rows) {
    cells.push_back({name, std::to_string(r.after ? r.after->nodes : r.before.nodes), num(r.before.d_B_to_C),
                     opt(r.after, true), pct(r.variation_pct_B_to_C), num(r.before.d_C_to_B), opt(r.after, false),
                     pct(r.variation_pct_C_to_B)});
  }
  std::array<std::size_t, 8> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < 8; ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 8; ++c) {
      std::string cell = row[c];
      cell.resize(width[c], ' ');
      out += cell;
      out += c + 1 < 8 ? " | " : "\n";
    }
  }
  return out;
}

}  // namespace silvec
