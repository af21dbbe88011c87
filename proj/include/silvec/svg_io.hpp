#pragma once

// SVG path interchange: a geometry-only reader for the path subset that has an
// exact cubic form (no elliptical arcs), projection of external vectorizations
// onto a curve, and a deterministic writer.

#include <silvec/bezier_fit.hpp>
#include <silvec/distance_field.hpp>
#include <silvec/errors.hpp>
#include <silvec/geometry.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace silvec {

// One closed subpath as a cycle of cubics; cubics[k].p[3] == cubics[k+1].p[0].
struct RawPath {
  std::vector<CubicBezier> cubics;
  // 'C' or 'R' per start node when the file recorded them (data-node-kinds); empty otherwise.
  std::string kinds;
};

// x' = a x + c y + e, y' = b x + d y + f
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  Point2 apply(Point2 p) const noexcept { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }

  // (*this) o (o): apply o first.
  Affine operator*(const Affine& o) const noexcept {
    return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d,
            b * o.c + d * o.d, a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }
};

inline CubicBezier elevate_line(Point2 a, Point2 b) noexcept {
  return {{a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b}};
}

inline CubicBezier elevate_quadratic(Point2 q0, Point2 q1, Point2 q2) noexcept {
  return {{q0, q0 + 2.0 / 3.0 * (q1 - q0), q2 + 2.0 / 3.0 * (q1 - q2), q2}};
}

namespace detail {

class Scanner {
public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (pos_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ',')) ++pos_;
  }
  bool done() {
    skip_separators();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_separators();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  char take() { return s_[pos_++]; }

  bool at_number() {
    const char ch = peek();
    return ch == '-' || ch == '+' || ch == '.' || std::isdigit(static_cast<unsigned char>(ch));
  }

  double number() {
    skip_separators();
    std::size_t p = pos_;
    if (p < s_.size() && s_[p] == '+') ++p;  // from_chars rejects a leading '+'
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + p, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) throw SvgError("malformed number in path data near offset " + std::to_string(pos_));
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return v;
  }

  Point2 point() {
    const double x = number();
    const double y = number();
    return {x, y};
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Affine parse_transform(std::string_view text) {
  Affine m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) ++pos;
    if (pos >= text.size()) break;
    const std::size_t open = text.find('(', pos);
    const std::size_t close = text.find(')', open);
    if (open == std::string_view::npos || close == std::string_view::npos)
      throw SvgError("malformed transform attribute");
    std::string_view name = text.substr(pos, open - pos);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    detail::Scanner sc(text.substr(open + 1, close - open - 1));
    std::vector<double> v;
    while (!sc.done()) v.push_back(sc.number());
    auto arg = [&](std::size_t i, double def) { return i < v.size() ? v[i] : def; };
    Affine t;
    if (name == "matrix") {
      if (v.size() != 6) throw SvgError("matrix() needs 6 arguments");
      t = {v[0], v[1], v[2], v[3], v[4], v[5]};
    } else if (name == "translate") {
      t.e = arg(0, 0.0);
      t.f = arg(1, 0.0);
    } else if (name == "scale") {
      t.a = arg(0, 1.0);
      t.d = arg(1, t.a);
    } else if (name == "rotate") {
      const double r = arg(0, 0.0) * std::numbers::pi / 180.0;
      const double cx = arg(1, 0.0), cy = arg(2, 0.0);
      const Affine rot{std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
      t = Affine{1, 0, 0, 1, cx, cy} * rot * Affine{1, 0, 0, 1, -cx, -cy};
    } else if (name == "skewX") {
      t.c = std::tan(arg(0, 0.0) * std::numbers::pi / 180.0);
    } else if (name == "skewY") {
      t.b = std::tan(arg(0, 0.0) * std::numbers::pi / 180.0);
    } else {
      throw SvgError("unknown transform '" + std::string(name) + "'");
    }
    m = m * t;
    pos = close + 1;
  }
  return m;
}

// Closed subpaths of one path's data attribute, mapped through `xf`.
inline std::vector<RawPath> parse_path_data(std::string_view d, const Affine& xf = {}) {
  detail::Scanner sc(d);
  std::vector<RawPath> out;
  std::vector<CubicBezier> cur;  // untransformed
  Point2 pen{}, start{}, last_ctrl{};
  char last_cmd = 0;
  bool has_subpath = false;

  auto add = [&](const CubicBezier& c) {
    cur.push_back(c);
    pen = c.p[3];
  };
  auto finish_open = [&]() {
    if (!cur.empty()) throw TopologyError("unclosed subpath (missing Z)");
  };
  auto close = [&]() {
    if (!has_subpath) throw SvgError("Z without a current subpath");
    if (distance(pen, start) > 1e-6) add(elevate_line(pen, start));
    else if (!cur.empty()) cur.back().p[3] = start;
    if (!cur.empty()) {
      RawPath rp;
      for (auto c : cur) {
        for (auto& p : c.p) p = xf.apply(p);
        rp.cubics.push_back(c);
      }
      out.push_back(std::move(rp));
    }
    cur.clear();
    pen = start;
  };

  char cmd = 0;
  while (!sc.done()) {
    if (!sc.at_number()) {
      cmd = sc.take();
    } else if (cmd == 0) {
      throw SvgError("path data must start with a command");
    } else if (cmd == 'M') {
      cmd = 'L';
    } else if (cmd == 'm') {
      cmd = 'l';
    } else if (cmd == 'Z' || cmd == 'z') {
      throw SvgError("numbers after Z");
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd)) != 0;
    const Point2 origin = rel ? pen : Point2{};
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    if (up != 'M' && up != 'Z' && !has_subpath) throw SvgError("path data must start with M");
    if (up != 'M' && up != 'Z' && cur.empty()) start = pen;  // drawing after Z restarts at the subpath start
    switch (up) {
      case 'M': {
        finish_open();
        pen = origin + sc.point();
        start = pen;
        has_subpath = true;
        break;
      }
      case 'L': add(elevate_line(pen, origin + sc.point())); break;
      case 'H': {
        const double x = sc.number() + (rel ? pen.x : 0.0);
        add(elevate_line(pen, {x, pen.y}));
        break;
      }
      case 'V': {
        const double y = sc.number() + (rel ? pen.y : 0.0);
        add(elevate_line(pen, {pen.x, y}));
        break;
      }
      case 'C': {
        const Point2 p1 = origin + sc.point(), p2 = origin + sc.point(), p3 = origin + sc.point();
        add({{pen, p1, p2, p3}});
        last_ctrl = p2;
        break;
      }
      case 'S': {
        const char lu = static_cast<char>(std::toupper(static_cast<unsigned char>(last_cmd)));
        const Point2 p1 = (lu == 'C' || lu == 'S') ? 2.0 * pen - last_ctrl : pen;
        const Point2 p2 = origin + sc.point(), p3 = origin + sc.point();
        add({{pen, p1, p2, p3}});
        last_ctrl = p2;
        break;
      }
      case 'Q': {
        const Point2 q1 = origin + sc.point(), q2 = origin + sc.point();
        add(elevate_quadratic(pen, q1, q2));
        last_ctrl = q1;
        break;
      }
      case 'T': {
        const char lu = static_cast<char>(std::toupper(static_cast<unsigned char>(last_cmd)));
        const Point2 q1 = (lu == 'Q' || lu == 'T') ? 2.0 * pen - last_ctrl : pen;
        const Point2 q2 = origin + sc.point();
        add(elevate_quadratic(pen, q1, q2));
        last_ctrl = q1;
        break;
      }
      case 'Z': close(); break;
      case 'A': throw UnsupportedCommandError(cmd);
      default: throw SvgError(std::string("unknown path command '") + cmd + "'");
    }
    last_cmd = cmd;
  }
  finish_open();
  return out;
}

namespace detail {

struct Tag {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  bool closing = false;
  bool self_closing = false;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
      if (k == key) return &v;
    return nullptr;
  }
};

inline std::string decode_entities(std::string v) {
  static const std::pair<std::string_view, char> table[] = {
      {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}, {"&amp;", '&'}};
  for (const auto& [ent, ch] : table) {
    for (std::size_t p = v.find(ent); p != std::string::npos; p = v.find(ent, p + 1)) v.replace(p, ent.size(), 1, ch);
  }
  return v;
}

inline Tag parse_tag(std::string_view body) {
  Tag t;
  std::size_t p = 0;
  if (!body.empty() && body[0] == '/') {
    t.closing = true;
    ++p;
  }
  if (!body.empty() && body.back() == '/') {
    t.self_closing = true;
    body.remove_suffix(1);
  }
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  const std::size_t name_end = std::min(body.size(), body.find_first_of(" \t\r\n", p));
  t.name = std::string(body.substr(p, name_end - p));
  p = name_end;
  while (p < body.size()) {
    while (p < body.size() && is_space(body[p])) ++p;
    if (p >= body.size()) break;
    const std::size_t eq = body.find('=', p);
    if (eq == std::string_view::npos) break;
    std::string_view key = body.substr(p, eq - p);
    while (!key.empty() && is_space(key.back())) key.remove_suffix(1);
    std::size_t q = eq + 1;
    while (q < body.size() && is_space(body[q])) ++q;
    if (q >= body.size() || (body[q] != '"' && body[q] != '\'')) throw SvgError("malformed attribute in <" + t.name + ">");
    const char quote = body[q];
    const std::size_t end = body.find(quote, q + 1);
    if (end == std::string_view::npos) throw SvgError("unterminated attribute in <" + t.name + ">");
    t.attrs.emplace_back(std::string(key), decode_entities(std::string(body.substr(q + 1, end - q - 1))));
    p = end + 1;
  }
  return t;
}

}  // namespace detail

// Every closed subpath of every <path> element (outside <defs>-like
// containers), with group and element transforms applied.
inline std::vector<RawPath> parse_svg(std::string_view text) {
  std::vector<RawPath> out;
  std::vector<std::pair<std::string, Affine>> stack;
  int hidden = 0;
  auto current = [&]() { return stack.empty() ? Affine{} : stack.back().second; };
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    auto skip_to = [&](std::string_view term) {
      const std::size_t e = text.find(term, pos);
      if (e == std::string_view::npos) throw SvgError("unterminated markup");
      pos = e + term.size();
    };
    if (text.substr(pos, 4) == "<!--") { skip_to("-->"); continue; }
    if (text.substr(pos, 9) == "<![CDATA[") { skip_to("]]>"); continue; }
    if (text.substr(pos, 2) == "<?") { skip_to("?>"); continue; }
    if (text.substr(pos, 2) == "<!") { skip_to(">"); continue; }
    std::size_t end = pos + 1;
    char quote = 0;
    for (; end < text.size(); ++end) {
      const char ch = text[end];
      if (quote) { if (ch == quote) quote = 0; }
      else if (ch == '"' || ch == '\'') quote = ch;
      else if (ch == '>') break;
    }
    if (end >= text.size()) throw SvgError("unterminated tag");
    const detail::Tag tag = detail::parse_tag(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    const bool container_hidden = tag.name == "defs" || tag.name == "clipPath" || tag.name == "mask" ||
                                  tag.name == "symbol" || tag.name == "pattern" || tag.name == "marker";
    if (tag.closing) {
      if (!stack.empty() && stack.back().first == tag.name) {
        stack.pop_back();
        if (container_hidden) --hidden;
      }
      continue;
    }
    Affine xf = current();
    if (const auto* tr = tag.attr("transform")) xf = xf * parse_transform(*tr);
    if (tag.name == "path" && hidden == 0) {
      if (const auto* d = tag.attr("d")) {
        auto paths = parse_path_data(*d, xf);
        const auto* kinds = tag.attr("data-node-kinds");
        if (kinds && paths.size() == 1 && kinds->size() == paths[0].cubics.size() &&
            kinds->find_first_not_of("CR") == std::string::npos)
          paths[0].kinds = *kinds;
        out.insert(out.end(), std::make_move_iterator(paths.begin()), std::make_move_iterator(paths.end()));
      }
    }
    if (!tag.self_closing) {
      stack.emplace_back(tag.name, xf);
      if (container_hidden) ++hidden;
    }
  }
  return out;
}

struct ImportOptions {
  double snap_radius = 10.0;
};

namespace detail {

// Indices of the longest strictly increasing subsequence, choosing the
// lexicographically smallest index sequence among maximal ones.
inline std::vector<std::size_t> longest_increasing(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> from(n, 1);  // LIS length starting at i
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = i + 1; j < n; ++j)
      if (v[j] > v[i]) from[i] = std::max(from[i], from[j] + 1);
  std::vector<std::size_t> keep;
  std::size_t need = *std::max_element(from.begin(), from.end());
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n && need > 0; ++i) {
    if (from[i] == need && v[i] > last) {
      keep.push_back(i);
      last = v[i];
      --need;
    }
  }
  return keep;
}

inline double handle_angle(const CubicBezier& c) {
  for (const Point2 d : {c.p[1] - c.p[0], c.p[2] - c.p[0], c.p[3] - c.p[0]})
    if (norm(d) > 0.0) return std::atan2(d.y, d.x);
  return 0.0;
}

// Tangent of a regular node from both collinear handles, summed so the longer
// one dominates; a short handle loses most of its direction to rounding.
inline double regular_angle(const CubicBezier& in, const CubicBezier& out) {
  const Point2 a = in.p[3] - in.p[2], b = out.p[1] - out.p[0];
  if (norm(a) == 0.0 && norm(b) == 0.0) return handle_angle(out);
  const Point2 ref = norm(b) >= norm(a) ? b : a;
  // A negative handle parameter points the handle backwards; align before summing.
  const Point2 d = (dot(a, ref) < 0.0 ? -1.0 : 1.0) * a + (dot(b, ref) < 0.0 ? -1.0 : 1.0) * b;
  const double ang = std::atan2(d.y, d.x);
  // Keep the orientation of the outgoing handle when it is meaningful.
  return dot(b, ref) < 0.0 ? ang + std::numbers::pi : ang;
}

}  // namespace detail

// Maps an external closed path onto the curve: every end point becomes a node
// at its nearest curve parameter. Nodes are Corner unless the file recorded
// kinds (our own output does); a recorded Regular node keeps its tangent
// constraint. Inner control points are kept as given; sections whose end
// points were dropped are refit.
inline BezierChain import_chain(const RawPath& raw, const ClosedCurve& curve, const CurveIndex& index,
                                const ImportOptions& opts = {}) {
  std::vector<CubicBezier> cubics = raw.cubics;
  if (cubics.empty()) throw TopologyError("empty path");
  const std::size_t k = cubics.size();
  std::string kinds = raw.kinds.size() == k ? raw.kinds : std::string(k, 'C');
  auto project = [&](const std::vector<CubicBezier>& cs) {
    std::vector<double> ts;
    for (const auto& c : cs) {
      const NearestPoint np = index.nearest(c.p[0]);
      if (np.dist > opts.snap_radius) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "end point (%.3f, %.3f) is %.3f px from the curve (snap radius %.3f)",
                      c.p[0].x, c.p[0].y, np.dist, opts.snap_radius);
        throw ImportError(buf);
      }
      ts.push_back(np.t);
    }
    return ts;
  };
  std::vector<double> ts = project(cubics);

  // Align traversal with the curve orientation by majority vote over steps.
  std::size_t forward = 0, backward = 0;
  for (std::size_t i = 0; i < k && k > 1; ++i) {
    const double f = curve.length_between(ts[i], ts[(i + 1) % k]);
    if (f == 0.0) continue;
    (f < curve.total_length() - f ? forward : backward)++;
  }
  if (backward > forward) {
    std::reverse(cubics.begin(), cubics.end());
    for (auto& c : cubics) c = CubicBezier{{c.p[3], c.p[2], c.p[1], c.p[0]}};
    // Reversed cubic j starts where old cubic k - j started.
    const std::string old = kinds;
    for (std::size_t j = 0; j < k; ++j) kinds[j] = old[(k - j) % k];
    ts = project(cubics);
  }

  std::vector<double> offsets(k);
  for (std::size_t i = 0; i < k; ++i) offsets[i] = curve.length_between(ts[0], ts[i]);
  const auto keep = detail::longest_increasing(offsets);
  if (keep.size() < 2) throw TopologyError("fewer than 2 end points survive projection onto the curve");

  BezierChain chain;
  for (std::size_t i : keep) {
    const bool regular = kinds[i] == 'R';
    const double alpha = regular ? detail::regular_angle(cubics[(i + k - 1) % k], cubics[i]) : detail::handle_angle(cubics[i]);
    chain.nodes.push_back(make_node(curve, ts[i], alpha, regular ? NodeKind::Regular : NodeKind::Corner));
  }
  const std::size_t n = keep.size();
  chain.segments.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t a = keep[j], b = keep[(j + 1) % n];
    const std::size_t span = (b + k - a) % k;
    const Node& s = chain.nodes[j];
    const Node& e = chain.nodes[(j + 1) % n];
    if (span == 1) {
      const double L = section_length(curve, s.t, e.t);
      const CubicBezier c{{s.position, cubics[a].p[1], cubics[a].p[2], e.position}};
      BezierSegment seg;
      seg.set_params(from_control_points(c, s.alpha, e.alpha, L));
      seg.L = L;
      if (!s.is_corner()) seg.gamma = 0.0;
      if (!e.is_corner()) seg.delta = 0.0;
      chain.segments[j] = seg;
    } else {
      chain.segments[j] = linear_fit(curve, s, e, j);
    }
  }
  // Rotate so the smallest parameter comes first.
  const auto first = std::min_element(chain.nodes.begin(), chain.nodes.end(),
                                      [](const Node& x, const Node& y) { return x.t < y.t; }) -
                     chain.nodes.begin();
  std::rotate(chain.nodes.begin(), chain.nodes.begin() + first, chain.nodes.end());
  std::rotate(chain.segments.begin(), chain.segments.begin() + first, chain.segments.end());
  return chain;
}

inline std::string format_coord(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string path_data(const BezierChain& chain) {
  std::string d;
  if (chain.size() == 0) return d;
  auto pt = [&](Point2 p) { return format_coord(p.x) + " " + format_coord(p.y); };
  d += "M " + pt(chain.nodes[0].position);
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const CubicBezier c = chain.cubic(n);
    d += " C " + pt(c.p[1]) + " " + pt(c.p[2]) + " " + pt(c.p[3]);
  }
  d += " Z";
  return d;
}

inline std::string write_svg(const std::vector<BezierChain>& chains, int width, int height) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  const std::string w = std::to_string(width), h = std::to_string(height);
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w +
         " " + h + "\">\n";
  for (const auto& c : chains) {
    std::string kinds;
    for (const auto& n : c.nodes) kinds += n.is_corner() ? 'C' : 'R';
    out += "  <path fill=\"black\" data-node-kinds=\"" + kinds + "\" d=\"" + path_data(c) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace silvec
