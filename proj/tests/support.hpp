#pragma once

#include <silvec/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using silvec::ClosedCurve;
using silvec::Point2;

inline ClosedCurve circle_curve(double radius, Point2 center = {0.0, 0.0}, std::size_t count = 0) {
  if (count == 0) count = static_cast<std::size_t>(std::lround(2.0 * std::numbers::pi * radius));
  std::vector<Point2> pts;
  for (std::size_t k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    pts.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
  }
  return ClosedCurve(pts);
}

// Polygon through the given vertices, re-sampled at ~1 px.
inline ClosedCurve polygon_curve(const std::vector<Point2>& vertices, double spacing = 1.0) {
  return ClosedCurve(vertices).resampled(spacing);
}

inline ClosedCurve rectangle_curve(double x0, double y0, double x1, double y1) {
  return polygon_curve({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Distance from p to segment [a, b], written out independently of the library.
inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double f = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  f = std::clamp(f, 0.0, 1.0);
  return std::hypot(p.x - (a.x + f * dx), p.y - (a.y + f * dy));
}

inline double brute_distance(const ClosedCurve& c, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.size(); ++i)
    best = std::min(best, segment_distance(p, c.sample(i), c.sample((i + 1) % c.size())));
  return best;
}

inline double brute_distance(const std::vector<Point2>& poly, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return best;
}

inline std::filesystem::path temp_dir(const std::string& name) {
#ifdef SILVEC_TEST_TMP
  std::filesystem::path dir = std::filesystem::path(SILVEC_TEST_TMP) / name;
#else
  std::filesystem::path dir = std::filesystem::temp_directory_path() / ("silvec_" + name);
#endif
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
