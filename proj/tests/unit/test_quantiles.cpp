#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "smre/error.hpp"
#include "smre/quantiles.hpp"
#include "smre/random.hpp"

using namespace smre;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                              {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                              {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalStream, MomentsAndIndependentStreams) {
  NormalStream a(42, 0), b(42, 1);
  double s = 0, s2 = 0, cross = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a(), y = b();
    s += x;
    s2 += x * x;
    cross += x * y;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(cross / n, 0.0, 0.01);
}

TEST(EmpiricalQuantile, OrderStatistic) {
  std::vector<double> v = {5, 1, 4, 2, 3};
  EXPECT_EQ(empirical_quantile(v, 0.5), 3.0);  // ceil(2.5) = 3rd
  EXPECT_EQ(empirical_quantile(v, 0.2), 1.0);
  EXPECT_EQ(empirical_quantile(v, 0.9), 5.0);
  EXPECT_THROW(empirical_quantile({}, 0.5), InvalidArgument);
}

TEST(GlobalQuantile, MonotoneInAlphaAndDeterministicAcrossThreads) {
  const Grid g(1, 64);
  const WindowSystem ws = enumerate(g, 1, 16);
  const ConstraintSystem sys =
      ConstraintSystem::windowed(ws, Transform::Identity, 1.0, normalized_coefficients(ws));
  const NoiseModel noise(1.0);
  const QuantileTable a = simulate_global_quantile(sys, noise, 0.5, 300, 7, 1);
  const QuantileTable b = simulate_global_quantile(sys, noise, 0.9, 300, 7, 1);
  EXPECT_LE(a.global_q, b.global_q);
  const QuantileTable c = simulate_global_quantile(sys, noise, 0.9, 300, 7, 3);
  EXPECT_EQ(b, c);
  EXPECT_EQ(simulate_statistics(sys, noise, 50, 7, 1), simulate_statistics(sys, noise, 50, 7, 4));
  EXPECT_THROW(simulate_global_quantile(sys, noise, 1.0, 300, 7), InvalidArgument);
  EXPECT_THROW(simulate_global_quantile(sys, noise, 0.9, 50, 7), InvalidArgument);
}

TEST(GlobalQuantile, LinearInSigmaForIdentity) {
  const Grid g(1, 32);
  const WindowSystem ws = enumerate(g, 1, 8);
  const ConstraintSystem sys =
      ConstraintSystem::windowed(ws, Transform::Identity, 1.0, normalized_coefficients(ws));
  const double q1 = simulate_global_quantile(sys, NoiseModel(1.0), 0.8, 200, 3).global_q;
  const double q3 = simulate_global_quantile(sys, NoiseModel(3.0), 0.8, 200, 3).global_q;
  EXPECT_NEAR(q3, 3.0 * q1, 1e-12 * q3);
}

TEST(PerScale, QuadraticInSigmaAndPositive) {
  const Grid g(2, 16);
  const QuantileTable t1 = per_scale_constants(g, 1, 4, NoiseModel(1.0), 0.9, 200, 11);
  const QuantileTable t2 = per_scale_constants(g, 1, 4, NoiseModel(2.0), 0.9, 200, 11);
  for (int s = 1; s <= 4; ++s) {
    EXPECT_GT(t1.per_scale.at(s), 0.0);
    EXPECT_NEAR(t2.per_scale.at(s), 4.0 * t1.per_scale.at(s), 1e-12 * t2.per_scale.at(s));
  }
  const auto c = scale_coefficients(t1, 1, 4);
  EXPECT_DOUBLE_EQ(c[0], 1.0 / t1.per_scale.at(1));
  EXPECT_THROW(scale_coefficients(t1, 1, 5), InvalidArgument);
}

TEST(PerScale, SingletonScaleNearExtremeValueApproximation) {
  // max of m^2 squared normals is about 2 log(m^2)
  const Grid g(2, 128);
  const QuantileTable t = per_scale_constants(g, 1, 1, NoiseModel(1.0), 0.5, 100, 5);
  const double approx = 2.0 * std::log(128.0 * 128.0);
  EXPECT_GT(t.per_scale.at(1), 0.7 * approx);
  EXPECT_LT(t.per_scale.at(1), 1.3 * approx);
}

TEST(QuantileTable, SerializationRoundTripsBitExactly) {
  const Grid g(1, 32);
  QuantileTable t = per_scale_constants(g, 1, 5, NoiseModel(0.37), 0.9, 150, 99);
  t.global_q = 0.1 + 0.2;  // not representable in short decimal
  const QuantileTable back = parse_table(serialize(t));
  EXPECT_EQ(back, t);
  for (const auto& [s, q] : t.per_scale) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(q), std::bit_cast<std::uint64_t>(back.per_scale.at(s)));
  }
  std::string tampered = serialize(t);
  tampered.replace(tampered.find("seed=99"), 7, "seed=98");
  EXPECT_THROW(parse_table(tampered), Error);
}

TEST(QuantileTable, CacheFilesKeyedByContent) {
  const auto dir = std::filesystem::temp_directory_path() / "smre-quantile-test";
  std::filesystem::remove_all(dir);
  const Grid g(1, 32);
  const QuantileTable req = per_scale_request(g, 1, 3, NoiseModel(1.0), 0.9, 120, 1);
  EXPECT_FALSE(load_cached(req, dir).has_value());
  const QuantileTable t = per_scale_constants(g, 1, 3, NoiseModel(1.0), 0.9, 120, 1);
  EXPECT_EQ(t.hash(), req.hash());
  write_table(t, cache_file(dir, t.hash()));
  const auto hit = load_cached(req, dir);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(*hit, t);
  const QuantileTable other = per_scale_request(g, 1, 3, NoiseModel(2.0), 0.9, 120, 1);
  EXPECT_NE(other.hash(), req.hash());
  EXPECT_FALSE(load_cached(other, dir).has_value());
  std::filesystem::remove_all(dir);
}
