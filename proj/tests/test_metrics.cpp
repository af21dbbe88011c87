#include "support.hpp"

#include <silvec/curvature_vectorizer.hpp>
#include <silvec/metrics.hpp>
#include <silvec/raster.hpp>
#include <silvec/synthetic.hpp>

#include <gtest/gtest.h>

using namespace silvec;

namespace {

BezierChain square_chain(const ClosedCurve& c, double offset) {
  // Corners of the square [0,200]^2 pushed outward by `offset`.
  const std::array<Point2, 4> v{Point2{-offset, -offset}, Point2{200 + offset, -offset}, Point2{200 + offset, 200 + offset},
                                Point2{-offset, 200 + offset}};
  BezierChain chain;
  for (int k = 0; k < 4; ++k) {
    Node n = make_node(c, 200.0 * k, 0.0, NodeKind::Corner);
    n.position = v[k];
    chain.nodes.push_back(n);
  }
  for (int k = 0; k < 4; ++k) {
    const Point2 a = v[k], b = v[(k + 1) % 4];
    BezierSegment s;
    s.L = 200.0;
    s.set_params(from_control_points(CubicBezier{{a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b}}, 0.0, 0.0, s.L));
    chain.segments.push_back(s);
  }
  return chain;
}

// d(B, C) by brute force at ten times the density.
double reference_b_to_c(const ClosedCurve& c, const BezierChain& chain) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const CubicBezier b = chain.cubic(n);
    const std::size_t m = 10 * quadrature_intervals(chain.segments[n].L);
    for (std::size_t k = 0; k < m; ++k) {
      const double u = (k + 0.5) / static_cast<double>(m);
      const double sp = norm(b.derivative(u));
      num += testing_support::brute_distance(c, b.eval(u)) * sp;
      den += sp;
    }
  }
  return num / den;
}

struct Blob {
  ClosedCurve curve = extract_boundaries(synthetic::blob_with_hole()).at(0);
  CurveIndex index{curve};
  BezierChain chain = vectorize(curve, index, {}).chain;
};

}  // namespace

TEST(Metrics, ChainOnCurve) {
  const ClosedCurve c = testing_support::polygon_curve({{0, 0}, {200, 0}, {200, 200}, {0, 200}});
  const CurveIndex index(c);
  const BezierChain chain = square_chain(c, 0.0);
  EXPECT_LT(dist_chain_to_curve(index, chain), 1e-3);
  EXPECT_LT(dist_curve_to_chain(c, chain), 1e-2);
}

TEST(Metrics, UnitOffsetSquare) {
  const ClosedCurve c = testing_support::polygon_curve({{0, 0}, {200, 0}, {200, 200}, {0, 200}});
  const CurveIndex index(c);
  const BezierChain chain = square_chain(c, 1.0);
  const double d = dist_chain_to_curve(index, chain);
  EXPECT_NEAR(d, reference_b_to_c(c, chain), 1e-3);
  EXPECT_NEAR(d, 1.0, 0.05);
}

TEST(Metrics, HalfCoverageIsAsymmetric) {
  Blob b;
  const std::size_t m = b.chain.size() / 2;
  ASSERT_GE(m, 2u);
  // Follow the chain over its first m sections, then retrace them backwards:
  // every point of B stays on C but half of C is never visited.
  BezierChain partial;
  for (std::size_t n = 0; n <= m; ++n) partial.nodes.push_back(b.chain.nodes[n]);
  for (std::size_t n = m - 1; n >= 1; --n) partial.nodes.push_back(b.chain.nodes[n]);
  for (std::size_t n = 0; n < m; ++n) partial.segments.push_back(b.chain.segments[n]);
  for (std::size_t n = m; n-- > 0;) {
    const CubicBezier c = b.chain.cubic(n);
    const CubicBezier back{{c.p[3], c.p[2], c.p[1], c.p[0]}};
    BezierSegment s;
    s.L = b.chain.segments[n].L;
    s.set_params(from_control_points(back, b.chain.nodes[n + 1].alpha, b.chain.nodes[n].alpha, s.L));
    partial.segments.push_back(s);
  }
  ASSERT_EQ(partial.nodes.size(), partial.segments.size());
  const double bc = dist_chain_to_curve(b.index, partial), cb = dist_curve_to_chain(b.curve, partial);
  EXPECT_NEAR(bc, dist_chain_to_curve(b.index, b.chain), 0.5);
  EXPECT_GT(cb, 10.0 * bc);
}

TEST(Metrics, TranslationInvariance) {
  Blob b;
  const ChainMetrics m0 = measure(b.curve, b.index, b.chain);
  const Point2 shift{37.25, -12.5};
  std::vector<Point2> moved;
  for (const auto p : b.curve.samples()) moved.push_back(p + shift);
  const ClosedCurve c2(moved);
  BezierChain chain2 = b.chain;
  for (auto& n : chain2.nodes) n.position += shift;
  const ChainMetrics m1 = measure(c2, CurveIndex(c2), chain2);
  EXPECT_NEAR(m1.d_B_to_C, m0.d_B_to_C, 1e-6 * m0.d_B_to_C);
  EXPECT_NEAR(m1.d_C_to_B, m0.d_C_to_B, 1e-6 * m0.d_C_to_B);
}

TEST(Metrics, QuadratureDensityStable) {
  Blob b;
  const double d1 = chain_to_curve_parts(b.index, b.chain, 1.0).value();
  const double d2 = chain_to_curve_parts(b.index, b.chain, 2.0).value();
  EXPECT_NEAR(d2, d1, 0.01 * d1);
}

TEST(Metrics, ChainToCurveIsEnergyOverLength) {
  Blob b;
  const double energy = total_energy(b.index, b.chain, RefineParams{});
  double length = 0.0;
  for (std::size_t n = 0; n < b.chain.size(); ++n)
    length += segment_length(b.chain.segments[n], b.chain.nodes[n], b.chain.nodes[b.chain.next(n)]);
  EXPECT_NEAR(dist_chain_to_curve(b.index, b.chain), energy / length, 1e-9);
}

TEST(Metrics, BothDirectionsSimilarOnCoveringChain) {
  Blob b;
  const ChainMetrics m = measure(b.curve, b.index, b.chain);
  EXPECT_NEAR(m.d_C_to_B, m.d_B_to_C, 0.2 * m.d_B_to_C);
}

TEST(Metrics, FlattenWithinTolerance) {
  Blob b;
  const auto poly = flatten(b.chain, 0.05);
  for (std::size_t n = 0; n < b.chain.size(); ++n) {
    const CubicBezier c = b.chain.cubic(n);
    for (int k = 0; k <= 200; ++k) EXPECT_LE(testing_support::brute_distance(poly, c.eval(k / 200.0)), 0.05 + 1e-9);
  }
}

TEST(Compare, VariationArithmetic) {
  ChainMetrics before{10, 1.48, 1.5, 100.0, 100.0}, after{10, 0.68, 0.75, 100.0, 100.0};
  const MetricsReport r = compare(before, after);
  ASSERT_TRUE(r.variation_pct_B_to_C.has_value());
  EXPECT_NEAR(*r.variation_pct_B_to_C, -54.05, 0.01);
  EXPECT_NEAR(*r.variation_pct_C_to_B, -50.0, 1e-12);
  EXPECT_NEAR(*compare(before, before).variation_pct_B_to_C, 0.0, 1e-15);
  EXPECT_GT(*compare(after, before).variation_pct_B_to_C, 0.0);
  ChainMetrics zero{10, 0.0, 0.0, 1.0, 1.0};
  EXPECT_FALSE(compare(zero, after).variation_pct_B_to_C.has_value());
}

TEST(Compare, IdenticalChainsZeroVariation) {
  Blob b;
  const MetricsReport r = compare(b.curve, b.index, b.chain, b.chain);
  EXPECT_EQ(*r.variation_pct_B_to_C, 0.0);
  EXPECT_EQ(*r.variation_pct_C_to_B, 0.0);
}

TEST(Report, JsonFields) {
  ChainMetrics before{12, 1.48, 1.5, 100.0, 100.0}, after{12, 0.68, 0.75, 100.0, 100.0};
  const auto j = to_json(compare(before, after));
  EXPECT_EQ(j["nodes"], 12);
  EXPECT_DOUBLE_EQ(j["before"]["d_B_to_C"].get<double>(), 1.48);
  EXPECT_DOUBLE_EQ(j["after"]["d_C_to_B"].get<double>(), 0.75);
  EXPECT_NEAR(j["variation_pct_B_to_C"].get<double>(), -54.054, 1e-3);
  const auto single = to_json(before);
  EXPECT_TRUE(single.contains("d_B_to_C"));
  EXPECT_FALSE(single.contains("variation_pct_B_to_C"));
}

TEST(Report, TableLayout) {
  ChainMetrics before{12, 1.48, 1.5, 100.0, 100.0}, after{12, 0.68, 0.75, 100.0, 100.0};
  const std::string t = format_table({{"cat", compare(before, after)}});
  const auto first_line = t.substr(0, t.find('\n'));
  for (const char* col : {"Silhouette", "Nodes", "d(B0,C)", "d(Binf,C)", "Var. Perc.", "d(C,B0)", "d(C,Binf)"})
    EXPECT_NE(first_line.find(col), std::string::npos) << col;
  EXPECT_NE(t.find("-54.05%"), std::string::npos);
  EXPECT_NE(t.find("1.48"), std::string::npos);
  EXPECT_NE(t.find("0.68"), std::string::npos);
}

TEST(Aggregate, LengthWeighted) {
  const ChainMetrics a{4, 1.0, 2.0, 100.0, 50.0}, b{2, 4.0, 1.0, 300.0, 150.0};
  const ChainMetrics m = aggregate({a, b});
  EXPECT_EQ(m.nodes, 6u);
  EXPECT_DOUBLE_EQ(m.d_B_to_C, (100.0 + 1200.0) / 400.0);
  EXPECT_DOUBLE_EQ(m.d_C_to_B, (100.0 + 150.0) / 200.0);
}
