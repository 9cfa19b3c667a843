#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mhdlab/dss.hpp"
#include "mhdlab/errors.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/spectral.hpp"
#include "oracles.hpp"

using namespace mhdlab;

namespace {

double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

}  // namespace

TEST(Shell, IndexAtPowersOfLambda) {
  EXPECT_EQ(shell_index(2.0, 8.0), 3);
  EXPECT_EQ(shell_index(2.0, 7.999), 2);
  EXPECT_EQ(shell_index(2.0, 1.0), 0);
  EXPECT_EQ(shell_index(2.0, 0.5), -1);
  EXPECT_EQ(shell_index(2.0, 0.499), -2);
  EXPECT_EQ(shell_index(3.0, 9.0), 2);
  EXPECT_EQ(shell_index(3.0, 8.999), 1);
}

TEST(Generator, SupportedInAnnulusAndDivergenceFree) {
  const DssGenerator gen;
  EXPECT_EQ(norm(gen.g({0.5, 0.3, 0.1})), 0.0);
  EXPECT_EQ(norm(gen.g({1.5, 1.5, 0.5})), 0.0);
  EXPECT_GT(norm(gen.g({1.1, 0.5, 0.3})), 0.0);
  for (const Point x : {Point{1.2, 0.3, 0.1}, Point{0.4, -1.1, 0.7}, Point{-0.9, 0.9, -0.6}})
    EXPECT_NEAR(gen.divergence(x), 0.0, 1e-12);
}

TEST(Generator, DivergenceAgreesWithFiniteDifferences) {
  DssGenerator gen;
  gen.poloidal = 0.0;
  const Point x{1.1, 0.4, -0.5};
  double fd = 0.0;
  const double h = 1e-6;
  for (int a = 0; a < 3; ++a) {
    Point p = x, m = x;
    p[a] += h;
    m[a] -= h;
    fd += (gen.g(p)[a] - gen.g(m)[a]) / (2 * h);
  }
  EXPECT_NEAR(gen.divergence(x), fd, 1e-7);
}

TEST(DssValue, ScalingIdentity) {
  const DssGenerator gen;
  for (const Point x : {Point{1.3, 0.2, -0.4}, Point{0.2, 0.3, 0.1}, Point{5.0, -3.0, 1.0}}) {
    const Point y{2.0 * x[0], 2.0 * x[1], 2.0 * x[2]};
    const Point a = dss_value(gen, x), b = dss_value(gen, y);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(2.0 * b[i], a[i], 1e-14 * std::max(1.0, std::abs(a[i])));
  }
  EXPECT_THROW(dss_value(gen, {0.0, 0.0, 0.0}), DomainError);
}

TEST(DssValue, ForcingScalingAndLogPeriodicity) {
  DssGenerator gen;
  gen.has_forcing = true;
  const double t = 0.37;
  const Point x{1.2, 0.7, -0.3};
  const Point y{2.0 * x[0], 2.0 * x[1], 2.0 * x[2]};
  const auto a = dss_forcing_value(gen, t, x);
  const auto b = dss_forcing_value(gen, 4.0 * t, y);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(4.0 * b[i], a[i], 1e-13 * std::max(1.0, std::abs(a[i])));
  EXPECT_NEAR(gen.time_profile(0.3), gen.time_profile(1.2), 1e-14);
  EXPECT_THROW(dss_forcing_value(gen, 0.0, x), DomainError);
  EXPECT_THROW(dss_forcing_value(DssGenerator(), t, x), DomainError);
}

TEST(Extension, ResidualVanishesOnLattice) {
  const DssField u = dss_extend(DssGenerator(), DssSampling{16, 4.0, -1.0});
  const auto pts = dyadic_sample_points(u);
  ASSERT_FALSE(pts.empty());
  bool interp = true;
  EXPECT_EQ(dss_residual(u, pts, &interp), 0.0);
  EXPECT_FALSE(interp);
  for (const auto& p : pts) EXPECT_GE(norm(p), u.r_core());
  EXPECT_GT(u.scale(), 0.0);
}

TEST(Extension, InterpolationBetweenLatticePoints) {
  const DssGenerator gen;
  const DssField u = dss_extend(gen, DssSampling{24, 3.0, -1.0});
  bool interp = false;
  const Point x{1.234, 0.567, -0.891};
  const Point v = u.eval(x, &interp);
  EXPECT_TRUE(interp);
  const Point ref = dss_value(gen, x);
  EXPECT_LE(norm({v[0] - ref[0], v[1] - ref[1], v[2] - ref[2]}), 0.05 * u.scale());
  EXPECT_THROW(u.eval({2.99, 0.0, 0.0}), DomainError);
}

TEST(ShellIntegral, ConstantFieldGivesBallVolume) {
  const DssField::Fn one = [](const Point&) { return Point{1.0, 0.0, 0.0}; };
  const double r0 = 0.5, r1 = 2.0;
  EXPECT_NEAR(shell_integral(one, 0.0, r0, r1), 4.0 / 3.0 * std::numbers::pi * (r1 * r1 * r1 - r0 * r0 * r0),
              1e-12);
  // w = (1 + |x|)^{-1}: 4 pi [r^2 / 2 - r + log(1 + r)]
  auto F = [](double r) { return r * r / 2.0 - r + std::log1p(r); };
  EXPECT_NEAR(shell_integral(one, 1.0, r0, r1), 4.0 * std::numbers::pi * (F(r1) - F(r0)), 1e-12);
}

TEST(NormStudy, IncrementRatiosApproachLambdaPower) {
  const DssField u = dss_extend(DssGenerator(), DssSampling{32, 4.0, -1.0});
  // far from the core the regularized weight (1 + r)^-gamma behaves like r^-gamma
  const std::vector<double> radii{8.0, 16.0, 32.0, 64.0, 128.0};
  const auto st = dss_weighted_norm_study(u, {0.5, 1.5}, radii);
  ASSERT_EQ(st.size(), 2u);
  for (const auto& s : st) {
    EXPECT_NEAR(s.expected_ratio, std::pow(2.0, 1.0 - s.gamma), 1e-15);
    ASSERT_FALSE(s.ratios.empty());
    for (double r : s.ratios) EXPECT_NEAR(r, s.expected_ratio, 0.1 * s.expected_ratio) << s.gamma;
    for (std::size_t i = 1; i < s.norms.size(); ++i) EXPECT_GE(s.norms[i], s.norms[i - 1]);
  }
  EXPECT_FALSE(st[0].converges);
  EXPECT_TRUE(st[1].converges);
}

TEST(Forcing, CenteredDealiasedTensor) {
  DssGenerator gen;
  gen.has_forcing = true;
  const Grid g(16, 2.0 * std::numbers::pi);
  const TensorField F = dss_forcing(gen, 0.5, g, 1.0);
  EXPECT_FALSE(F.is_zero());
  EXPECT_THROW(dss_forcing(DssGenerator(), 0.5, g, 1.0), DomainError);
}

TEST(Rotation, ThreeTimesIsIdentity) {
  const Grid g(16, 2.0 * std::numbers::pi);
  InitialSpec s;
  s.type = "random";
  const auto u = make_initial(s, g, 4).first;
  const VectorField r3 = rotate_axes(rotate_axes(rotate_axes(u)));
  for (int a = 0; a < 3; ++a) EXPECT_EQ(oracle::max_diff(r3[a].physical(), u[a].physical()), 0.0);
  const VectorField r1 = rotate_axes(u);
  EXPECT_GT(l2_norm(r1 - u), 0.0);
  EXPECT_NEAR(l2_norm(r1), l2_norm(u), 1e-14 * l2_norm(u));
  EXPECT_LE(relative_divergence(r1), 1e-13);
}

TEST(ScalingCheck, LinearRegimeAndZeroData) {
  auto cfg = oracle::small_config(16, "orszag_tang");
  cfg.initial.amplitude = 1e-8;
  cfg.t_end = 0.004;
  const auto r = scaling_covariance_check(cfg, 2.0);
  EXPECT_LE(r.max_rel_diff, 1e-10);
  EXPECT_EQ(r.times.size(), r.rel_diff.size());
  auto z = cfg;
  z.initial.type = "zero";
  EXPECT_EQ(scaling_covariance_check(z, 2.0).max_rel_diff, 0.0);
  EXPECT_THROW(scaling_covariance_check(cfg, 0.0), DomainError);
}
