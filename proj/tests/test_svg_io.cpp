#include "support.hpp"

#include <silvec/curvature_vectorizer.hpp>
#include <silvec/raster.hpp>
#include <silvec/svg_io.hpp>
#include <silvec/synthetic.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace silvec;

namespace {

void expect_near(Point2 a, Point2 b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
}

struct Blob {
  ClosedCurve curve = extract_boundaries(synthetic::blob_with_hole()).at(0);
  CurveIndex index{curve};
  BezierChain chain = vectorize(curve, index, {}).chain;
};

}  // namespace

TEST(ParsePath, TwoCubics) {
  const auto paths = parse_path_data("M 0 0 C 1 0 2 0 3 0 C 2 1 1 1 0 0 Z");
  ASSERT_EQ(paths.size(), 1u);
  ASSERT_EQ(paths[0].cubics.size(), 2u);
  expect_near(paths[0].cubics[1].p[1], {2, 1}, 0.0);
  expect_near(paths[0].cubics[1].p[3], {0, 0}, 0.0);
}

TEST(ParsePath, LinesElevatedToThirds) {
  const auto paths = parse_path_data("M 0 0 L 3 0 L 3 3 Z");
  ASSERT_EQ(paths.size(), 1u);
  const auto& c = paths[0].cubics;
  ASSERT_EQ(c.size(), 3u);  // Z closes with a line
  expect_near(c[0].p[1], {1, 0}, 1e-15);
  expect_near(c[0].p[2], {2, 0}, 1e-15);
  expect_near(c[1].p[1], {3, 1}, 1e-15);
  expect_near(c[1].p[2], {3, 2}, 1e-15);
  expect_near(c[2].p[1], {2, 2}, 1e-15);
  expect_near(c[2].p[2], {1, 1}, 1e-15);
}

TEST(ParsePath, QuadraticElevationIsExact) {
  const Point2 q0{1, 2}, q1{40, -30}, q2{70, 15};
  const CubicBezier c = elevate_quadratic(q0, q1, q2);
  for (int k = 0; k <= 100; ++k) {
    const double u = k / 100.0, v = 1.0 - u;
    const Point2 q = v * v * q0 + 2.0 * v * u * q1 + u * u * q2;
    expect_near(c.eval(u), q, 1e-9);
  }
  const CubicBezier l = elevate_line({0, 0}, {9, 3});
  for (int k = 0; k <= 100; ++k) expect_near(l.eval(k / 100.0), {9.0 * k / 100.0, 3.0 * k / 100.0}, 1e-9);
}

TEST(ParsePath, RelativeAndShorthandCommands) {
  // Square drawn with h/v, then a path with smooth cubic and quadratic shorthands.
  const auto sq = parse_path_data("m10,10 h5 v5 h-5 z");
  ASSERT_EQ(sq.size(), 1u);
  ASSERT_EQ(sq[0].cubics.size(), 4u);
  expect_near(sq[0].cubics[1].p[0], {15, 10}, 0.0);
  expect_near(sq[0].cubics[2].p[0], {15, 15}, 0.0);

  const auto s = parse_path_data("M0 0 C 0 10 10 10 10 0 S 20 -10 20 0 Q 10 20 0 0 Z");
  ASSERT_EQ(s.size(), 1u);
  ASSERT_EQ(s[0].cubics.size(), 3u);
  // S reflects the previous second control point about the current point.
  expect_near(s[0].cubics[1].p[1], {10, -10}, 1e-12);
  const auto t = parse_path_data("M0 0 Q 5 10 10 0 T 20 0 T 10 -5 Z");
  ASSERT_EQ(t.size(), 1u);
  // T reflects the previous quadratic control point: (15, -10).
  const CubicBezier expect = elevate_quadratic({10, 0}, {15, -10}, {20, 0});
  expect_near(t[0].cubics[1].p[1], expect.p[1], 1e-12);
  expect_near(t[0].cubics[1].p[2], expect.p[2], 1e-12);
}

TEST(ParsePath, CompactNumberSyntax) {
  const auto p = parse_path_data("M.5.5L1e1,0.5l-2-3z");
  ASSERT_EQ(p.size(), 1u);
  expect_near(p[0].cubics[0].p[0], {0.5, 0.5}, 0.0);
  expect_near(p[0].cubics[0].p[3], {10, 0.5}, 0.0);
  expect_near(p[0].cubics[1].p[3], {8, -2.5}, 1e-12);
}

TEST(ParsePath, ArcIsUnsupported) {
  try {
    parse_path_data("M 0 0 A 5 5 0 0 1 10 0 Z");
    FAIL() << "expected UnsupportedCommandError";
  } catch (const UnsupportedCommandError& e) {
    EXPECT_EQ(e.command(), 'A');
  }
  EXPECT_THROW(parse_path_data("M 0 0 a 5 5 0 0 1 10 0 Z"), UnsupportedCommandError);
}

TEST(ParsePath, UnclosedSubpathIsTopologyError) {
  EXPECT_THROW(parse_path_data("M 0 0 L 10 0 L 10 10"), TopologyError);
  EXPECT_THROW(parse_path_data("M 0 0 L 10 0 L 10 10 Z M 20 20 L 30 20"), TopologyError);
}

TEST(ParseSvg, TransformsAndIgnoredContainers) {
  const std::string doc = R"svg(<?xml version="1.0"?>
<!-- a comment with <path d="M 0 0 Z"/> inside -->
<svg xmlns="http://www.w3.org/2000/svg">
  <defs><path d="M 0 0 L 1 0 L 1 1 Z"/></defs>
  <g transform="translate(100, 50)">
    <g transform="scale(2)">
      <path transform="rotate(90)" d="M 0 0 L 10 0 L 10 10 Z"/>
    </g>
  </g>
  <path d="M 1 1 L 2 1 L 2 2 Z M 5 5 L 6 5 L 6 6 Z"/>
</svg>)svg";
  const auto paths = parse_svg(doc);
  ASSERT_EQ(paths.size(), 3u);
  // rotate(90): (10, 0) -> (0, 10); scale 2 -> (0, 20); translate -> (100, 70).
  expect_near(paths[0].cubics[0].p[3], {100, 70}, 1e-9);
  expect_near(paths[0].cubics[1].p[3], {80, 70}, 1e-9);
  expect_near(paths[2].cubics[0].p[0], {5, 5}, 0.0);
}

TEST(ParseSvg, MatrixAndSkewTransforms) {
  const Affine m = parse_transform("matrix(1 2 3 4 5 6)");
  const Point2 p = m.apply({1, 1});
  EXPECT_DOUBLE_EQ(p.x, 1 + 3 + 5);
  EXPECT_DOUBLE_EQ(p.y, 2 + 4 + 6);
  const Affine r = parse_transform("rotate(180 10 10)");
  expect_near(r.apply({0, 0}), {20, 20}, 1e-12);
  const Affine k = parse_transform("skewX(45)");
  expect_near(k.apply({0, 1}), {1, 1}, 1e-12);
}

TEST(WriteSvg, EmptyAndSingleSegment) {
  const std::string empty = write_svg({}, 64, 32);
  EXPECT_NE(empty.find("viewBox=\"0 0 64 32\""), std::string::npos);
  EXPECT_EQ(empty.find("<path"), std::string::npos);
  EXPECT_TRUE(parse_svg(empty).empty());

  const ClosedCurve c = testing_support::circle_curve(40.0);
  BezierChain one;
  one.nodes.push_back(make_node(c, 0.0, 1.5, NodeKind::Corner));
  one.segments.push_back(BezierSegment{1.0, 0.2, 1.0, -0.2, c.total_length()});
  const std::string doc = write_svg({one}, 100, 100);
  const auto start = doc.find(" d=\"");
  const std::string d = doc.substr(start + 4, doc.find('"', start + 4) - start - 4);
  EXPECT_EQ(d.rfind("M ", 0), 0u);
  EXPECT_EQ(std::count(d.begin(), d.end(), 'C'), 1);
  EXPECT_EQ(d.substr(d.size() - 2), " Z");
  EXPECT_NE(doc.find("fill=\"black\""), std::string::npos);
}

TEST(WriteSvg, ThreeDecimalCoordinates) {
  EXPECT_EQ(format_coord(1.0), "1.000");
  EXPECT_EQ(format_coord(-0.0001), "0.000");
  EXPECT_EQ(format_coord(2.34567), "2.346");
}

TEST(Roundtrip, WriteParseImportReproducesControlPoints) {
  Blob b;
  const auto raws = parse_svg(write_svg({b.chain}, 1024, 1024));
  ASSERT_EQ(raws.size(), 1u);
  ASSERT_EQ(raws[0].cubics.size(), b.chain.size());
  EXPECT_EQ(raws[0].kinds.size(), b.chain.size());
  const BezierChain back = import_chain(raws[0], b.curve, b.index);
  ASSERT_EQ(back.size(), b.chain.size());
  for (std::size_t n = 0; n < back.size(); ++n) {
    const CubicBezier x = b.chain.cubic(n), y = back.cubic(n);
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(x.p[k].x, y.p[k].x, 1e-3) << n << "/" << k;
      EXPECT_NEAR(x.p[k].y, y.p[k].y, 1e-3) << n << "/" << k;
    }
    EXPECT_EQ(back.nodes[n].kind, b.chain.nodes[n].kind);
  }
  EXPECT_TRUE(is_cyclic_increasing(b.curve, back));
  EXPECT_TRUE(satisfies_regular_constraints(back));
}

TEST(Import, WithoutRecordedKindsEveryNodeIsCorner) {
  Blob b;
  RawPath raw = parse_svg(write_svg({b.chain}, 1024, 1024)).at(0);
  raw.kinds.clear();
  const BezierChain back = import_chain(raw, b.curve, b.index);
  for (const auto& n : back.nodes) EXPECT_TRUE(n.is_corner());
}

TEST(Import, ReversedPathIsReoriented) {
  Blob b;
  RawPath raw = parse_svg(write_svg({b.chain}, 1024, 1024)).at(0);
  std::reverse(raw.cubics.begin(), raw.cubics.end());
  for (auto& c : raw.cubics) c = CubicBezier{{c.p[3], c.p[2], c.p[1], c.p[0]}};
  const std::string kinds = raw.kinds;
  const std::size_t k = kinds.size();
  for (std::size_t j = 0; j < k; ++j) raw.kinds[j] = kinds[(k - j) % k];
  const BezierChain back = import_chain(raw, b.curve, b.index);
  EXPECT_EQ(back.size(), b.chain.size());
  EXPECT_TRUE(is_cyclic_increasing(b.curve, back));
  for (std::size_t n = 0; n < back.size(); ++n) {
    EXPECT_NEAR(back.nodes[n].t, b.chain.nodes[n].t, 1e-2);
    EXPECT_EQ(back.nodes[n].kind, b.chain.nodes[n].kind);
  }
}

TEST(Import, OutOfOrderEndPointDropped) {
  Blob b;
  ASSERT_GE(b.chain.size(), 5u);
  RawPath raw = parse_svg(write_svg({b.chain}, 1024, 1024)).at(0);
  // Move end point 3 to just behind end point 1: it now projects out of order.
  const Point2 moved = b.curve.point_at(b.chain.nodes[1].t - 5.0);
  raw.cubics[2].p[3] = moved;
  raw.cubics[3].p[0] = moved;
  const BezierChain back = import_chain(raw, b.curve, b.index);
  ASSERT_EQ(back.size(), b.chain.size() - 1);
  EXPECT_TRUE(is_cyclic_increasing(b.curve, back));
  for (const auto& n : back.nodes) EXPECT_GT(std::abs(n.t - b.curve.wrap(b.chain.nodes[1].t - 5.0)), 1e-6);
  // The merged section spans the old nodes 2 -> 4 and is a refit.
  bool merged = false;
  for (std::size_t n = 0; n < back.size(); ++n)
    if (std::abs(back.nodes[n].t - b.chain.nodes[2].t) < 1e-2)
      merged = std::abs(back.nodes[back.next(n)].t - b.chain.nodes[4].t) < 1e-2;
  EXPECT_TRUE(merged);
}

TEST(Import, FarEndPointIsImportError) {
  Blob b;
  RawPath raw = parse_svg(write_svg({b.chain}, 1024, 1024)).at(0);
  raw.cubics[0].p[0] = {-100.0, -100.0};
  try {
    import_chain(raw, b.curve, b.index);
    FAIL() << "expected ImportError";
  } catch (const ImportError& e) {
    EXPECT_NE(std::string(e.what()).find("-100.000"), std::string::npos);
  }
}

TEST(Import, TooFewSurvivorsIsTopologyError) {
  Blob b;
  RawPath raw;
  const Point2 p = b.curve.sample(0);
  raw.cubics.push_back(elevate_line(p, p + Point2{0.0, 0.0}));
  EXPECT_THROW(import_chain(raw, b.curve, b.index), TopologyError);
}
