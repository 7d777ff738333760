#include "gazeshift/fixmap.hpp"

#include <cmath>
#include <random>

#include "gazeshift/map_export.hpp"
#include "gtest/gtest.h"
#include "oracles.hpp"

namespace gazeshift {
namespace {

constexpr ImageSize kVga{640, 480};

Points points_of(std::initializer_list<std::pair<double, double>> pts) {
  Points p(2, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index i = 0;
  for (const auto& [x, y] : pts) {
    p(0, i) = x;
    p(1, i) = y;
    ++i;
  }
  return p;
}

TEST(SplatGaussian, PeakIsOneAtCenter) {
  const auto map = splat_gaussian(kVga, 320, 240, KernelParams::from_sigma(25));
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  EXPECT_EQ(map.values().maxCoeff(&row, &col), 1.0);
  EXPECT_EQ(row, 240);
  EXPECT_EQ(col, 320);
  EXPECT_FALSE(map.normalized());
}

TEST(SplatGaussian, ValueOneSigmaAway) {
  const auto map = splat_gaussian(kVga, 320, 240, KernelParams::from_sigma(25));
  EXPECT_NEAR(map(240, 345), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(map(215, 320), 0.6065306597, 1e-10);
}

TEST(SplatGaussian, FootprintIsTruncated) {
  const auto params = KernelParams::from_sigma(25);
  EXPECT_EQ(params.truncate_radius_px, 75);
  const auto map = splat_gaussian(kVga, 320, 240, params);
  EXPECT_GT(map(240, 395), 0.0);
  EXPECT_EQ(map(240, 396), 0.0);
  EXPECT_GT(map(165, 245), 0.0);
  EXPECT_EQ(map(164, 245), 0.0);
}

TEST(SplatGaussian, CornerSplatIsClipped) {
  const auto params = KernelParams::from_sigma(25);
  const auto corner = splat_gaussian(kVga, 0, 0, params);
  const auto interior = splat_gaussian(kVga, 320, 240, params);
  const int r = params.truncate_radius_px;
  EXPECT_EQ(corner.values().block(r + 1, 0, 480 - r - 1, 640).maxCoeff(), 0.0);
  EXPECT_EQ(corner.values().block(0, r + 1, 480, 640 - r - 1).maxCoeff(), 0.0);
  EXPECT_LT(corner.values().sum(), interior.values().sum());
  EXPECT_NEAR(corner.values().sum(), interior.values().sum() / 4.0, interior.values().sum() / 8.0);
}

TEST(SplatGaussian, RejectsPointsOutsideImage) {
  const auto params = KernelParams::from_sigma(25);
  for (auto [x, y] : std::vector<std::pair<double, double>>{{-0.1, 0}, {640, 0}, {0, 480}, {NAN, 1}}) {
    try {
      splat_gaussian(kVga, x, y, params);
      ADD_FAILURE() << x << "," << y;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::PointOutOfBounds);
    }
  }
}

TEST(KernelParams, Validation) {
  EXPECT_THROW(KernelParams::from_sigma(0.0), Error);
  EXPECT_THROW(KernelParams::from_sigma(-2.0), Error);
  EXPECT_EQ(KernelParams::from_sigma(0.2).truncate_radius_px, 1);
  KernelParams p;
  p.truncate_radius_px = 0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(BuildFixationMap, SinglePointIsNormalizedWithPeakAtPoint) {
  const auto map = build_fixation_map(points_of({{100, 50}}), kVga, KernelParams::from_sigma(25));
  EXPECT_TRUE(map.normalized());
  EXPECT_NEAR(map.values().sum(), 1.0, 1e-9);
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  map.values().maxCoeff(&row, &col);
  EXPECT_EQ(row, 50);
  EXPECT_EQ(col, 100);
}

TEST(BuildFixationMap, RepeatedPointIsBitIdentical) {
  const auto params = KernelParams::from_sigma(25);
  const auto once = build_fixation_map(points_of({{123.4, 301.7}}), kVga, params);
  const auto twice = build_fixation_map(points_of({{123.4, 301.7}, {123.4, 301.7}}), kVga, params);
  EXPECT_TRUE(once.values() == twice.values());
}

TEST(BuildFixationMap, DistantPointsSplitMassEvenly) {
  // 10 sigma apart, both far from the borders
  const double sigma = 10.0;
  const auto params = KernelParams::from_sigma(sigma);
  const auto map = build_fixation_map(points_of({{270, 240}, {370, 240}}), kVga, params);

  const auto dense = oracle::dense_fixation_map({{270, 240}, {370, 240}}, 640, 480, sigma,
                                                params.truncate_radius_px);
  double max_diff = 0.0;
  for (int y = 0; y < 480; ++y) {
    for (int x = 0; x < 640; ++x) {
      max_diff = std::max(max_diff, std::abs(map(y, x) - dense[static_cast<std::size_t>(y) * 640 + x]));
    }
  }
  EXPECT_LT(max_diff, 1e-15);

  const double left = map.values().leftCols(320).sum();
  const double right = map.values().rightCols(320).sum();
  EXPECT_NEAR(left, 0.5, 1e-6);
  EXPECT_NEAR(right, 0.5, 1e-6);
  EXPECT_EQ(map(240, 270), map(240, 370));
  EXPECT_EQ(map(240, 270), map.values().maxCoeff());
  EXPECT_LT(map(240, 320), map(240, 270) * 1e-6);
}

TEST(BuildFixationMap, MatchesDenseOracleOnRandomInputs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 80.0);
  std::uniform_real_distribution<double> uy(0.0, 60.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<double, double>> pts;
    Points p(2, 6);
    for (int i = 0; i < 6; ++i) {
      pts.emplace_back(ux(rng), uy(rng));
      p(0, i) = pts.back().first;
      p(1, i) = pts.back().second;
    }
    const auto map = build_fixation_map(p, {80, 60}, KernelParams::from_sigma(4.5));
    const auto dense = oracle::dense_fixation_map(pts, 80, 60, 4.5, 14);
    for (int y = 0; y < 60; ++y) {
      for (int x = 0; x < 80; ++x) ASSERT_NEAR(map(y, x), dense[y * 80 + x], 1e-15);
    }
  }
}

TEST(BuildFixationMap, Errors) {
  const auto params = KernelParams::from_sigma(25);
  try {
    build_fixation_map(Points(2, 0), kVga, params);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPoints);
  }
  EXPECT_THROW(build_fixation_map(points_of({{10, 10}, {10, 480}}), kVga, params), Error);
}

TEST(BuildFixationMap, NormalizationHoldsForRandomPointSets) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(0.0, 160.0);
  std::uniform_real_distribution<double> uy(0.0, 120.0);
  std::uniform_int_distribution<int> count(1, 30);
  for (int trial = 0; trial < 100; ++trial) {
    Points p(2, count(rng));
    for (Eigen::Index i = 0; i < p.cols(); ++i) p.col(i) << ux(rng), uy(rng);
    const auto map = build_fixation_map(p, {160, 120}, KernelParams::from_sigma(10));
    ASSERT_NEAR(map.values().sum(), 1.0, 1e-9);
    ASSERT_GE(map.values().minCoeff(), 0.0);
    ASSERT_TRUE(map.values().allFinite());
  }
}

TEST(SplatProperties, InteriorTranslationIsExact) {
  const auto params = KernelParams::from_sigma(7);
  const int r = params.truncate_radius_px;
  const ImageSize size{120, 90};
  for (double frac : {0.0, 0.25, 0.5, 0.75}) {
    const double x = r + 3 + frac;
    const double y = r + 1.5;
    for (int d : {1, 5, 17}) {
      const auto a = splat_gaussian(size, x, y, params);
      const auto b = splat_gaussian(size, x + d, y, params);
      ASSERT_TRUE(b.values().rightCols(size.width - d) == a.values().leftCols(size.width - d))
          << frac << " " << d;
    }
  }
}

TEST(SplatProperties, InteriorSplatIsMirrorSymmetric) {
  const auto params = KernelParams::from_sigma(9);
  const auto map = splat_gaussian({101, 81}, 50, 40, params);
  const auto& v = map.values();
  EXPECT_LE((v - v.rowwise().reverse()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((v - v.colwise().reverse()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SplatProperties, BorderMassNeverExceedsInteriorMass) {
  const auto params = KernelParams::from_sigma(10);
  const ImageSize size{160, 120};
  const double interior = splat_gaussian(size, 80, 60, params).values().sum();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ux(0.0, 160.0);
  std::uniform_real_distribution<double> uy(0.0, 120.0);
  for (int trial = 0; trial < 200; ++trial) {
    ASSERT_LE(splat_gaussian(size, ux(rng), uy(rng), params).values().sum(), interior + 1e-9);
  }
}

TEST(SplatProperties, RepeatedBuildsAreBitIdentical) {
  const Points p = points_of({{12.5, 7.25}, {100.1, 99.9}, {33, 44}});
  const auto params = KernelParams::from_sigma(6);
  const auto first = build_fixation_map(p, {128, 128}, params);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(build_fixation_map(p, {128, 128}, params) == first);
}

TEST(BuildFixationMap, FloatScalarInstantiation) {
  const auto map = build_fixation_map<float>(points_of({{30, 20}}), {64, 48}, KernelParams::from_sigma(5));
  EXPECT_NEAR(map.values().sum(), 1.0f, 1e-5f);
  EXPECT_EQ(map(20, 30), map.values().maxCoeff());
}

class MapForFrame : public ::testing::Test {
 protected:
  VideoMeta meta_{160, 120, 15.0, 0};
  KernelParams params_ = KernelParams::from_sigma(10);
  GazeStream stream_ = parse_gaze_log(
      "0,0.00,50,50,1\n0,0.03,50,50,1\n2,0.13,20,30,1\n4,0.27,100,60,1\n5,0.30,90,60,0", meta_);
};

TEST_F(MapForFrame, DuplicatedSampleEqualsSingleSplat) {
  const auto map = map_for_frame(stream_, 0, 0, params_);
  ASSERT_TRUE(map.has_value());
  EXPECT_TRUE(map->values() == build_fixation_map(points_of({{50, 50}}), {160, 120}, params_).values());
}

TEST_F(MapForFrame, NoGazeWhenWindowIsEmpty) {
  EXPECT_FALSE(map_for_frame(stream_, 1, 0, params_).has_value());
  EXPECT_FALSE(map_for_frame(stream_, 5, 0, params_).has_value());  // only an invalid sample
}

TEST_F(MapForFrame, WindowUsesNeighbouringFrames) {
  const auto map = map_for_frame(stream_, 3, 1, params_);
  ASSERT_TRUE(map.has_value());
  const auto expected = build_fixation_map(points_of({{20, 30}, {100, 60}}), {160, 120}, params_);
  EXPECT_TRUE(map->values() == expected.values());
}

TEST(MapExport, PgmScalesMaxTo65535) {
  const auto map = build_fixation_map(points_of({{10, 5}, {30, 20}}), {40, 30}, KernelParams::from_sigma(3));
  const std::string bytes = encode_pgm16(map);
  EXPECT_EQ(bytes.substr(0, 15), "P5\n40 30\n65535\n");
  EXPECT_EQ(bytes.size(), 15u + 2 * 40 * 30);
  const Pgm16 pgm = decode_pgm16(bytes);
  EXPECT_EQ(pgm.width, 40);
  EXPECT_EQ(pgm.height, 30);
  EXPECT_EQ(*std::max_element(pgm.pixels.begin(), pgm.pixels.end()), 65535);
  EXPECT_EQ(pgm.pixels[5 * 40 + 10], 65535);  // big-endian peak
  EXPECT_EQ(static_cast<unsigned char>(bytes[15 + 2 * (5 * 40 + 10)]), 0xff);
  EXPECT_EQ(pgm.pixels[0], 0);
}

TEST(MapExport, CsvRoundTripIsBitExact) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  Points p(2, 4);
  for (Eigen::Index i = 0; i < 4; ++i) p.col(i) << u(rng), u(rng) * 0.8;
  const auto map = build_fixation_map(p, {50, 40}, KernelParams::from_sigma(4.3));
  const auto back = decode_map_csv(encode_map_csv(map));
  EXPECT_TRUE(back == map);
}

}  // namespace
}  // namespace gazeshift
