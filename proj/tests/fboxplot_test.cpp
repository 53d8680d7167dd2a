#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "fbpstream/errors.hpp"
#include "fbpstream/fboxplot.hpp"
#include "oracles.hpp"

using namespace fbpstream;

namespace {

std::vector<Curve> constants(std::size_t w, std::initializer_list<double> values) {
  std::vector<Curve> out;
  for (double v : values) out.push_back(Curve::constant(TimeGrid(w), v));
  return out;
}

void expect_constant(const Curve& c, double v) {
  for (double x : c.values()) EXPECT_EQ(x, v);
}

}  // namespace

TEST(BuildFbp, SingleCurveCollapses) {
  const TimeGrid grid(4);
  const std::vector<Curve> curves = {Curve(grid, {1.0, -2.0, 3.5, 0.0})};
  const auto fbp = build_fbp(curves, Window::at(0, 4));
  for (Component c : kComponents) EXPECT_EQ(fbp.component(c), curves[0]);
  EXPECT_EQ(fbp.n_source_curves(), 1u);
}

TEST(BuildFbp, ThreeConstants) {
  const auto fbp = build_fbp(constants(6, {0.0, 1.0, 2.0}), Window::at(0, 6));
  expect_constant(fbp.median(), 1.0);
  expect_constant(fbp.box_lower(), 0.0);
  expect_constant(fbp.box_upper(), 1.0);
  expect_constant(fbp.envelope_min(), 0.0);
  expect_constant(fbp.envelope_max(), 2.0);
}

TEST(BuildFbp, FarCurveIsFencedOut) {
  const auto fbp = build_fbp(constants(6, {0.0, 1.0, 10.0}), Window::at(0, 6));
  expect_constant(fbp.median(), 1.0);
  expect_constant(fbp.envelope_min(), 0.0);
  expect_constant(fbp.envelope_max(), 1.0);
}

TEST(BuildFbp, KeepingOutliersUsesTheFullRange) {
  const auto fbp = build_fbp(constants(6, {0.0, 1.0, 10.0}), Window::at(0, 6),
                             DepthKind::modified_band, {1.5, false});
  expect_constant(fbp.envelope_max(), 10.0);
  const auto inf = build_fbp(constants(6, {0.0, 1.0, 10.0}), Window::at(0, 6),
                             DepthKind::modified_band,
                             {std::numeric_limits<double>::infinity(), true});
  expect_constant(inf.envelope_max(), 10.0);
}

TEST(BuildFbp, InfiniteFenceGivesPointwiseMinMax) {
  std::mt19937_64 rng(3);
  const auto curves = oracle::random_curves(rng, 25, 30, false);
  const auto fbp = build_fbp(curves, Window::at(0, 30), DepthKind::modified_band,
                             {std::numeric_limits<double>::infinity(), true});
  for (std::size_t t = 0; t < 30; ++t) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : curves) {
      lo = std::min(lo, c[t]);
      hi = std::max(hi, c[t]);
    }
    EXPECT_EQ(fbp.envelope_min()[t], lo);
    EXPECT_EQ(fbp.envelope_max()[t], hi);
  }
}

TEST(BuildFbp, CentralRegionHullsTheDeepestHalf) {
  std::mt19937_64 rng(8);
  const auto curves = oracle::random_curves(rng, 9, 12, false);
  const auto depth = modified_band_depth(curves);
  const auto [lo, hi] = central_region(curves, depth);
  for (std::size_t t = 0; t < 12; ++t) {
    double l = INFINITY, h = -INFINITY;
    for (std::size_t r = 0; r < 5; ++r) {
      l = std::min(l, curves[depth.ranking[r]][t]);
      h = std::max(h, curves[depth.ranking[r]][t]);
    }
    EXPECT_EQ(lo[t], l);
    EXPECT_EQ(hi[t], h);
  }
  const auto fbp = build_fbp(curves, Window::at(0, 12));
  EXPECT_EQ(fbp.median(), curves[depth.ranking.front()]);
}

TEST(BuildFbp, ComponentsAreAlwaysOrdered) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng() % 40;
    auto curves = oracle::random_curves(rng, n, 2 + rng() % 30, rep % 3 == 0);
    if (rep % 5 == 0 && n > 2) curves[0] = curves[0].scaled(50.0);
    const auto kind = rep % 2 == 0 || n < 2 ? DepthKind::modified_band : DepthKind::band;
    const auto fbp = build_fbp(curves, Window::at(rep, curves[0].size()), kind);
    EXPECT_TRUE(fbp.is_ordered()) << "rep " << rep;
  }
}

TEST(BuildFbp, Errors) {
  EXPECT_THROW(build_fbp(std::vector<Curve>{}, Window::at(0, 3)), ArgumentError);
  EXPECT_THROW(build_fbp(constants(3, {0.0, 1.0}), Window::at(0, 3), DepthKind::modified_band,
                         {-1.0, true}),
               ConfigError);
}

TEST(FunctionalBoxplot, RejectsMixedGrids) {
  const Curve a = Curve::constant(TimeGrid(3), 0.0);
  const Curve b = Curve::constant(TimeGrid(4), 0.0);
  EXPECT_THROW(FunctionalBoxplot(a, a, b, a, a, Window::at(0, 3), 1), DataError);
}

TEST(MeanFbp, Examples) {
  const auto zero = oracle::constant_fbp(5, 0.0);
  const auto two = oracle::constant_fbp(5, 2.0);
  const auto four = oracle::constant_fbp(5, 4.0);
  const std::vector<FunctionalBoxplot> one = {two};
  EXPECT_TRUE(mean_fbp(one, std::vector<double>{3.0}).same_values(two));

  const std::vector<FunctionalBoxplot> pair = {zero, two};
  const auto mid = mean_fbp(pair, std::vector<double>{1.0, 1.0});
  for (Component c : kComponents) expect_constant(mid.component(c), 1.0);

  const std::vector<FunctionalBoxplot> skew = {zero, four};
  const auto m = mean_fbp(skew, std::vector<double>{3.0, 1.0});
  for (Component c : kComponents) expect_constant(m.component(c), 1.0);
}

TEST(MeanFbp, IdenticalInputsAreReproducedExactly) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto f = oracle::random_fbp(rng, 30);
    std::vector<FunctionalBoxplot> copies(1 + rng() % 20, f);
    std::vector<double> weights;
    for (std::size_t i = 0; i < copies.size(); ++i) weights.push_back(1.0 + rng() % 7);
    EXPECT_TRUE(mean_fbp(copies, weights).same_values(f));
  }
}

TEST(MeanFbp, MatchesPlainWeightedAverage) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<FunctionalBoxplot> fbps;
    std::vector<double> weights;
    for (std::size_t i = 0; i < 1 + rng() % 10; ++i) {
      fbps.push_back(oracle::random_fbp(rng, 20));
      weights.push_back(0.5 + static_cast<double>(rng() % 100) / 10.0);
    }
    const auto got = mean_fbp(fbps, weights);
    const auto want = oracle::weighted_mean(fbps, weights);
    for (Component c : kComponents) {
      for (std::size_t t = 0; t < 20; ++t) {
        EXPECT_NEAR(got.component(c)[t], want.component(c)[t], 1e-10);
      }
    }
    EXPECT_TRUE(got.is_ordered(1e-9));
  }
}

TEST(MeanFbp, Errors) {
  const auto a = oracle::constant_fbp(3, 0.0);
  const auto b = oracle::constant_fbp(4, 0.0);
  EXPECT_THROW(mean_fbp(std::vector<FunctionalBoxplot>{}, std::vector<double>{}), ArgumentError);
  EXPECT_THROW(mean_fbp(std::vector<FunctionalBoxplot>{a}, std::vector<double>{0.0}), ArgumentError);
  EXPECT_THROW(mean_fbp(std::vector<FunctionalBoxplot>{a, b}, std::vector<double>{1.0, 1.0}), DataError);
}
