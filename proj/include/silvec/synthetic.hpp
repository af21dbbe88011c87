#pragma once

// Synthetic binary silhouettes rasterized by pixel-center sampling.

#include <silvec/geometry.hpp>
#include <silvec/raster.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace silvec::synthetic {

inline BinaryImage rasterize(int width, int height, const std::function<bool(double, double)>& inside) {
  BinaryImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.set(x, y, inside(x + 0.5, y + 0.5));
  return img;
}

// Even-odd rule.
inline bool inside_polygon(const std::vector<Point2>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

inline BinaryImage disk(double radius = 300.0, int size = 1024) {
  const double c = size / 2.0;
  return rasterize(size, size, [=](double x, double y) { return std::hypot(x - c, y - c) <= radius; });
}

inline BinaryImage annulus(double outer = 300.0, double inner = 120.0, int size = 1024) {
  const double c = size / 2.0;
  return rasterize(size, size, [=](double x, double y) {
    const double r = std::hypot(x - c, y - c);
    return r <= outer && r > inner;
  });
}

inline BinaryImage two_disks(double radius = 150.0, int size = 1024) {
  return rasterize(size, size, [=](double x, double y) {
    return std::hypot(x - 300.0, y - 512.0) <= radius || std::hypot(x - 724.0, y - 512.0) <= radius;
  });
}

// Axis-aligned square with integer corners so its edges follow pixel cracks.
inline BinaryImage square(int side = 400, int size = 1024) {
  const int lo = (size - side) / 2;
  return rasterize(size, size, [=](double x, double y) { return x > lo && x < lo + side && y > lo && y < lo + side; });
}

inline BinaryImage rounded_square(double side = 600.0, double radius = 100.0, int size = 1024) {
  const double c = size / 2.0, h = side / 2.0 - radius;
  return rasterize(size, size, [=](double x, double y) {
    const double dx = std::max(std::abs(x - c) - h, 0.0), dy = std::max(std::abs(y - c) - h, 0.0);
    return std::hypot(dx, dy) <= radius;
  });
}

inline std::vector<Point2> star_polygon(int points = 5, double outer = 400.0, double inner = 170.0,
                                        Point2 center = {512.0, 512.0}) {
  std::vector<Point2> poly;
  for (int k = 0; k < 2 * points; ++k) {
    const double r = k % 2 == 0 ? outer : inner;
    const double a = -std::numbers::pi / 2.0 + k * std::numbers::pi / points;
    poly.push_back(center + r * unit_vector(a));
  }
  return poly;
}

inline BinaryImage star(int points = 5, double outer = 400.0, double inner = 170.0, int size = 1024) {
  const auto poly = star_polygon(points, outer, inner, {size / 2.0, size / 2.0});
  return rasterize(size, size, [&](double x, double y) { return inside_polygon(poly, x, y); });
}

inline std::vector<Point2> triangle_polygon(double side = 600.0, Point2 center = {512.0, 512.0}) {
  const double r = side / std::sqrt(3.0);
  std::vector<Point2> poly;
  for (int k = 0; k < 3; ++k) poly.push_back(center + r * unit_vector(-std::numbers::pi / 2.0 + k * 2.0 * std::numbers::pi / 3.0));
  return poly;
}

inline BinaryImage triangle(double side = 600.0, int size = 1024) {
  const auto poly = triangle_polygon(side, {size / 2.0, size / 2.0});
  return rasterize(size, size, [&](double x, double y) { return inside_polygon(poly, x, y); });
}

// Smooth lobed outline with an off-center circular hole.
inline BinaryImage blob_with_hole(int size = 1024) {
  const double c = size / 2.0;
  return rasterize(size, size, [=](double x, double y) {
    const double a = std::atan2(y - c, x - c);
    const double r = 330.0 + 60.0 * std::sin(3.0 * a) + 35.0 * std::cos(5.0 * a + 0.7);
    const bool in_hole = std::hypot(x - (c + 60.0), y - (c - 40.0)) <= 110.0;
    return std::hypot(x - c, y - c) <= r && !in_hole;
  });
}

// Rectangle whose top side is a sine wave.
inline BinaryImage wavy_rectangle(double amplitude = 4.0, double period = 80.0, int size = 1024) {
  return rasterize(size, size, [=](double x, double y) {
    if (x < 212.0 || x > 812.0 || y > 712.0) return false;
    return y >= 312.0 + amplitude * std::sin(2.0 * std::numbers::pi * (x - 212.0) / period);
  });
}

struct NamedShape {
  std::string name;
  BinaryImage image;
};

// The four-shape evaluation suite.
inline std::vector<NamedShape> evaluation_suite() {
  return {{"disk", disk()}, {"rounded_square", rounded_square()}, {"star", star()}, {"blob_with_hole", blob_with_hole()}};
}

}  // namespace silvec::synthetic
