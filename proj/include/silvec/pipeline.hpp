#pragma once

// The four command-line operations as in-process functions returning the
// report and the SVG text. Every Jordan curve gets its own chain; reports
// aggregate them length-weighted.

#include <silvec/active_contour.hpp>
#include <silvec/curvature_vectorizer.hpp>
#include <silvec/distance_field.hpp>
#include <silvec/errors.hpp>
#include <silvec/metrics.hpp>
#include <silvec/raster.hpp>
#include <silvec/svg_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace silvec {

struct PipelineOptions {
  int threshold = 128;
  bool invert = false;
  VectorizerParams vectorizer;
  RefineParams refine;  // w_overrides index segments across all curves in order
  bool refine_enabled = true;
  ImportOptions import;
};

struct CurveRun {
  std::size_t curve = 0;  // index into Silhouette::curves
  BezierChain before;
  std::optional<BezierChain> after;
  ChainMetrics before_metrics;
  std::optional<ChainMetrics> after_metrics;
  std::vector<double> trace;
  int sweeps = 0;
};

struct Silhouette {
  int width = 0;
  int height = 0;
  std::vector<ClosedCurve> curves;
  std::vector<CurveIndex> indexes;
};

struct PipelineResult {
  Silhouette silhouette;
  std::vector<CurveRun> runs;
  std::vector<std::string> warnings;

  std::vector<BezierChain> final_chains() const {
    std::vector<BezierChain> out;
    for (const auto& r : runs) out.push_back(r.after ? *r.after : r.before);
    return out;
  }
};

inline Silhouette make_silhouette(const BinaryImage& img) {
  Silhouette s;
  s.width = img.width;
  s.height = img.height;
  s.curves = extract_boundaries(img);
  for (const auto& c : s.curves) s.indexes.emplace_back(c);
  return s;
}

inline Silhouette load_silhouette(const std::string& path, const PipelineOptions& opts) {
  return make_silhouette(load_binary(path, opts.threshold, opts.invert));
}

namespace detail {

inline std::string format_warning(const char* fmt, std::size_t k, double v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, k, v);
  return buf;
}

// Weights for one curve's segments, taken from the global segment numbering.
inline RefineParams curve_params(const RefineParams& global, std::size_t offset, std::size_t count) {
  RefineParams p = global;
  p.w_overrides.clear();
  for (const auto& [seg, w] : global.w_overrides)
    if (seg >= offset && seg < offset + count) p.w_overrides[seg - offset] = w;
  return p;
}

inline void check_overrides(const RefineParams& params, std::size_t total_segments) {
  for (const auto& [seg, w] : params.w_overrides)
    if (seg >= total_segments)
      throw ParameterError("--w-segment index " + std::to_string(seg) + " exceeds the segment count " +
                           std::to_string(total_segments));
}

inline void refine_runs(PipelineResult& result, const PipelineOptions& opts) {
  std::size_t total = 0;
  for (const auto& r : result.runs) total += r.before.size();
  check_overrides(opts.refine, total);
  std::size_t offset = 0;
  for (auto& r : result.runs) {
    const ClosedCurve& curve = result.silhouette.curves[r.curve];
    const CurveIndex& index = result.silhouette.indexes[r.curve];
    const RefineParams params = curve_params(opts.refine, offset, r.before.size());
    offset += r.before.size();
    RefineResult refined = run(curve, index, r.before, params);
    r.after = std::move(refined.chain);
    r.trace = std::move(refined.trace);
    r.sweeps = refined.sweeps;
    r.after_metrics = measure(curve, index, *r.after);
  }
}

// Curve whose index puts every end point of `raw` closest; ties go to the lower index.
inline std::size_t match_curve(const RawPath& raw, const Silhouette& s) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.curves.size(); ++k) {
    double worst = 0.0;
    for (const auto& c : raw.cubics) worst = std::max(worst, s.indexes[k].distance(c.p[0]));
    if (worst < best_d) {
      best_d = worst;
      best = k;
    }
  }
  return best;
}

inline std::vector<CurveRun> import_runs(const Silhouette& s, const std::string& svg_text, const PipelineOptions& opts,
                                         std::vector<std::string>& warnings) {
  const auto raws = parse_svg(svg_text);
  if (raws.empty()) throw ImportError("no closed path in SVG input");
  std::vector<std::optional<BezierChain>> chains(s.curves.size());
  for (const auto& raw : raws) {
    const std::size_t k = match_curve(raw, s);
    if (chains[k]) throw TopologyError("two paths map onto curve " + std::to_string(k));
    chains[k] = import_chain(raw, s.curves[k], s.indexes[k], opts.import);
  }
  std::vector<CurveRun> runs;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    if (!chains[k]) {
      warnings.push_back(format_warning("curve %zu has no matching path (length %.1f px); skipped", k,
                                        s.curves[k].total_length()));
      continue;
    }
    CurveRun r;
    r.curve = k;
    r.before = std::move(*chains[k]);
    r.before_metrics = measure(s.curves[k], s.indexes[k], r.before);
    runs.push_back(std::move(r));
  }
  return runs;
}

}  // namespace detail

inline PipelineResult vectorize_silhouette(Silhouette s, const PipelineOptions& opts) {
  opts.vectorizer.validate();
  if (opts.refine_enabled) opts.refine.validate();
  PipelineResult result;
  result.silhouette = std::move(s);
  const Silhouette& sil = result.silhouette;
  for (std::size_t k = 0; k < sil.curves.size(); ++k) {
    const ClosedCurve& curve = sil.curves[k];
    if (!(curve.total_length() > 2.0 * opts.vectorizer.sigma)) {
      result.warnings.push_back(detail::format_warning("curve %zu skipped: length %.1f px is not above 2 sigma", k,
                                                       curve.total_length()));
      continue;
    }
    const VectorizeResult v = vectorize(curve, sil.indexes[k], opts.vectorizer);
    if (v.max_dist_unreached)
      result.warnings.push_back(detail::format_warning("curve %zu: max distance %.3f px above max-dist", k,
                                                       v.max_deviation));
    CurveRun r;
    r.curve = k;
    r.before = v.chain;
    r.before_metrics = measure(curve, sil.indexes[k], r.before);
    result.runs.push_back(std::move(r));
  }
  if (result.runs.empty()) throw EmptySilhouetteError("empty silhouette: no curve long enough to vectorize");
  if (opts.refine_enabled) detail::refine_runs(result, opts);
  return result;
}

inline PipelineResult refine_silhouette(Silhouette s, const std::string& svg_text, const PipelineOptions& opts) {
  opts.refine.validate();
  PipelineResult result;
  result.silhouette = std::move(s);
  result.runs = detail::import_runs(result.silhouette, svg_text, opts, result.warnings);
  detail::refine_runs(result, opts);
  return result;
}

inline PipelineResult measure_silhouette(Silhouette s, const std::string& svg_text, const PipelineOptions& opts) {
  PipelineResult result;
  result.silhouette = std::move(s);
  result.runs = detail::import_runs(result.silhouette, svg_text, opts, result.warnings);
  return result;
}

inline std::string result_svg(const PipelineResult& r) {
  return write_svg(r.final_chains(), r.silhouette.width, r.silhouette.height);
}

inline MetricsReport run_report(const CurveRun& r) {
  if (!r.after_metrics) return {r.before_metrics, std::nullopt, std::nullopt, std::nullopt};
  return compare(r.before_metrics, *r.after_metrics);
}

inline MetricsReport aggregate_report(const PipelineResult& result) {
  std::vector<ChainMetrics> before, after;
  for (const auto& r : result.runs) {
    before.push_back(r.before_metrics);
    if (r.after_metrics) after.push_back(*r.after_metrics);
  }
  if (after.empty() || after.size() != before.size()) return {aggregate(before), std::nullopt, std::nullopt, std::nullopt};
  return compare(aggregate(before), aggregate(after));
}

namespace detail {

inline nlohmann::ordered_json report_json(const MetricsReport& r) {
  if (r.after) return to_json(r);
  nlohmann::ordered_json j;
  j["nodes"] = r.before.nodes;
  j["before"] = to_json(r.before);
  return j;
}

}  // namespace detail

// Comparison report for vectorize and refine: aggregate fields at the top level,
// one entry per curve under "curves".
inline nlohmann::ordered_json comparison_json(const PipelineResult& result) {
  nlohmann::ordered_json j = detail::report_json(aggregate_report(result));
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (const auto& r : result.runs) {
    nlohmann::ordered_json c;
    c["curve"] = r.curve;
    c["length"] = result.silhouette.curves[r.curve].total_length();
    c.update(detail::report_json(run_report(r)));
    if (r.after) {
      c["sweeps"] = r.sweeps;
      c["energy_trace"] = r.trace;
    }
    curves.push_back(std::move(c));
  }
  j["curves"] = std::move(curves);
  j["warnings"] = result.warnings;
  return j;
}

// Report for metrics: the imported chains only.
inline nlohmann::ordered_json metrics_json(const PipelineResult& result) {
  std::vector<ChainMetrics> parts;
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (const auto& r : result.runs) {
    parts.push_back(r.before_metrics);
    nlohmann::ordered_json c;
    c["curve"] = r.curve;
    c.update(to_json(r.before_metrics));
    curves.push_back(std::move(c));
  }
  nlohmann::ordered_json j = to_json(aggregate(parts));
  j["curves"] = std::move(curves);
  j["warnings"] = result.warnings;
  return j;
}

inline std::string report_table(const PipelineResult& result, const std::string& name) {
  std::vector<std::pair<std::string, MetricsReport>> rows;
  if (result.runs.size() > 1)
    for (const auto& r : result.runs) rows.emplace_back(name + "#" + std::to_string(r.curve), run_report(r));
  rows.emplace_back(name, aggregate_report(result));
  std::string out = format_table(rows);
  for (const auto& w : result.warnings) out += "warning: " + w + "\n";
  return out;
}

// Curve in green, Bezier sections in black, regular nodes blue, corners red.
// Node kinds come from data-node-kinds when present; otherwise every end point
// is drawn as a corner.
inline std::string overlay_svg(const Silhouette& s, const std::string& svg_text) {
  const auto raws = parse_svg(svg_text);
  auto pt = [](Point2 p) { return format_coord(p.x) + " " + format_coord(p.y); };
  const std::string w = std::to_string(s.width), h = std::to_string(s.height);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w +
         " " + h + "\">\n";
  out += "  <g fill=\"none\" stroke=\"green\" stroke-width=\"1\">\n";
  for (const auto& c : s.curves) {
    std::string d = "M";
    for (std::size_t i = 0; i < c.size(); ++i) d += (i ? " L " : " ") + pt(c.sample(i));
    out += "    <path d=\"" + d + " Z\"/>\n";
  }
  out += "  </g>\n  <g fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n";
  for (const auto& r : raws) {
    std::string d = "M " + pt(r.cubics.front().p[0]);
    for (const auto& c : r.cubics) d += " C " + pt(c.p[1]) + " " + pt(c.p[2]) + " " + pt(c.p[3]);
    out += "    <path d=\"" + d + " Z\"/>\n";
  }
  out += "  </g>\n  <g stroke=\"none\">\n";
  for (const auto& r : raws) {
    for (std::size_t k = 0; k < r.cubics.size(); ++k) {
      const bool regular = !r.kinds.empty() && r.kinds[k] == 'R';
      const Point2 p = r.cubics[k].p[0];
      out += "    <circle cx=\"" + format_coord(p.x) + "\" cy=\"" + format_coord(p.y) + "\" r=\"3\" fill=\"" +
             (regular ? "blue" : "red") + "\"/>\n";
    }
  }
  out += "  </g>\n</svg>\n";
  return out;
}

}  // namespace silvec
