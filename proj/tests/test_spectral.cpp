#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mhdlab/errors.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/summation.hpp"
#include "oracles.hpp"

using namespace mhdlab;

namespace {

const double kPi = std::numbers::pi;

Grid box(int n) { return Grid(n, 2.0 * kPi); }

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(7, 1.0), DomainError);
  EXPECT_THROW(Grid(6, 1.0), DomainError);
  EXPECT_THROW(Grid(8, 0.0), DomainError);
  EXPECT_THROW(Grid(8, 1.0, 0.0), DomainError);
  EXPECT_NO_THROW(Grid(8, 1.0));
}

TEST(Grid, ModesAndCutoff) {
  const Grid g = box(16);
  EXPECT_EQ(g.mode(0), 0);
  EXPECT_EQ(g.mode(7), 7);
  EXPECT_EQ(g.mode(8), -8);
  EXPECT_EQ(g.mode(15), -1);
  EXPECT_EQ(g.dealias_cutoff(), 5);
  EXPECT_EQ(g.conj_index(3), 13);
  EXPECT_EQ(g.conj_index(0), 0);
}

TEST(Transform, MatchesDirectDft) {
  const Grid g = box(8);
  const ScalarField f = oracle::noise(g, 3);
  const auto ref = oracle::dft(g, f.physical());
  const auto& got = f.spectral();
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - got[i]));
  EXPECT_LE(err, 1e-14);
}

TEST(Transform, RoundTripIsNearIdentity) {
  const Grid g = box(16);
  double dev = -1.0;
  const ScalarField f = oracle::noise(g, 4);
  const ScalarField back = transform_roundtrip(f, &dev);
  EXPECT_LE(dev, 1e-14);
  EXPECT_LE(oracle::max_diff(back.physical(), f.physical()), 1e-14);
}

TEST(Transform, ZeroFieldStaysZero) {
  const Grid g = box(8);
  ScalarField z(g);
  EXPECT_TRUE(z.is_zero());
  double dev = -1.0;
  const ScalarField back = transform_roundtrip(z, &dev);
  EXPECT_EQ(oracle::max_abs(back.physical()), 0.0);
}

TEST(Derivative, SingleModeIsExact) {
  const Grid g = box(16);
  const ScalarField f = ScalarField::sample(g, [](double x, double y, double) {
    return std::sin(3.0 * x) * std::cos(2.0 * y);
  });
  const ScalarField dx = partial(f, 0);
  const ScalarField ref = ScalarField::sample(g, [](double x, double y, double) {
    return 3.0 * std::cos(3.0 * x) * std::cos(2.0 * y);
  });
  EXPECT_LE(oracle::max_diff(dx.physical(), ref.physical()), 1e-12);
  const ScalarField lap = laplacian(f);
  const ScalarField lref = -13.0 * f;
  EXPECT_LE(oracle::max_diff(lap.physical(), lref.physical()), 1e-12);
}

TEST(Derivative, NyquistDroppedForFirstDerivativeOnly) {
  const Grid g = box(8);
  const ScalarField f = ScalarField::sample(g, [](double x, double, double) {
    return std::cos(4.0 * x);
  });
  EXPECT_LE(oracle::max_abs(partial(f, 0).physical()), 1e-14);
  const ScalarField lap = laplacian(f);
  EXPECT_LE(oracle::max_diff(lap.physical(), (-16.0 * f).physical()), 1e-12);
}

TEST(Derivative, ScalesWithBoxLength) {
  const Grid g(16, 4.0);
  const double k = 2.0 * kPi / 4.0;
  const ScalarField f = ScalarField::sample(g, [&](double, double, double z) {
    return std::sin(k * z);
  });
  const ScalarField ref = ScalarField::sample(g, [&](double, double, double z) {
    return k * std::cos(k * z);
  });
  EXPECT_LE(oracle::max_diff(partial(f, 2).physical(), ref.physical()), 1e-12);
}

TEST(Leray, ProjectsOntoDivergenceFree) {
  const Grid g = box(16);
  const VectorField v(oracle::band_limited(g, 4, 1), oracle::band_limited(g, 4, 2),
                      oracle::band_limited(g, 4, 3));
  const VectorField p = leray_project(v);
  EXPECT_LE(relative_divergence(p), 1e-14);
  const VectorField pp = leray_project(p);
  for (int a = 0; a < 3; ++a)
    EXPECT_LE(oracle::max_diff(pp[a].physical(), p[a].physical()), 1e-13);
}

TEST(Leray, AnnihilatesGradients) {
  const Grid g = box(16);
  const ScalarField phi = oracle::band_limited(g, 4, 5);
  const VectorField p = leray_project(gradient(phi));
  EXPECT_LE(l2_norm(p), 1e-12 * l2_norm(gradient(phi)));
}

TEST(Leray, KeepsZeroMode) {
  const Grid g = box(8);
  const VectorField v(ScalarField::sample(g, [](double, double, double) { return 2.0; }),
                      ScalarField(g), ScalarField(g));
  const VectorField p = leray_project(v);
  EXPECT_NEAR(mean(p[0]), 2.0, 1e-14);
}

TEST(Riesz, SumOfSquaresIsMinusIdentity) {
  const Grid g = box(16);
  const ScalarField f = oracle::band_limited(g, 4, 6);
  ScalarField s(g);
  for (int i = 0; i < 3; ++i) s = s + riesz(riesz(f, i), i);
  EXPECT_LE(oracle::max_diff(s.physical(), (-1.0 * f).physical()), 1e-12);
}

TEST(Riesz, ContractionOfIdentityTensor) {
  const Grid g = box(16);
  const ScalarField f = oracle::band_limited(g, 3, 7);
  TensorField t(g);
  for (int i = 0; i < 3; ++i) t.at(i, i) = f;
  const ScalarField r = riesz_riesz_contract(t);
  EXPECT_LE(oracle::max_diff(r.physical(), (-1.0 * f).physical()), 1e-12);
}

TEST(Riesz, AntisymmetricTensorIsAnnihilated) {
  const Grid g = box(16);
  TensorField t(g);
  const ScalarField a = oracle::band_limited(g, 3, 8), b = oracle::band_limited(g, 3, 9);
  t.at(0, 1) = a;
  t.at(1, 0) = -1.0 * a;
  t.at(1, 2) = b;
  t.at(2, 1) = -1.0 * b;
  EXPECT_EQ(oracle::max_abs(riesz_riesz_contract(t).physical()), 0.0);
}

TEST(Heat, SingleModeDecay) {
  const Grid g = box(16);
  const ScalarField f = ScalarField::sample(g, [](double x, double y, double) {
    return std::sin(2.0 * x + y);
  });
  const ScalarField h = heat_propagate(f, 0.3);
  const ScalarField ref = std::exp(-5.0 * 0.3) * f;
  EXPECT_LE(oracle::max_diff(h.physical(), ref.physical()), 1e-14);
}

TEST(Heat, SemigroupProperty) {
  const Grid g = box(16);
  const ScalarField f = oracle::band_limited(g, 5, 10);
  const ScalarField a = heat_propagate(heat_propagate(f, 0.01), 0.02);
  const ScalarField b = heat_propagate(f, 0.03);
  EXPECT_LE(oracle::max_diff(a.physical(), b.physical()), 1e-14 * oracle::max_abs(f.physical()) * 10);
}

TEST(Dealias, ZeroesHighModes) {
  const Grid g = box(16);
  const ScalarField f = dealias(oracle::noise(g, 11));
  const auto& c = f.spectral();
  const int n = g.n(), cut = g.dealias_cutoff();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (std::abs(g.mode(i)) > cut || std::abs(g.mode(j)) > cut || std::abs(g.mode(k)) > cut)
          ASSERT_EQ(std::abs(c[g.index(i, j, k)]), 0.0);
}

TEST(Dealias, ProductOfLowModesIsExact) {
  const Grid g = box(16);
  const ScalarField a = ScalarField::sample(g, [](double x, double, double) { return std::sin(2.0 * x); });
  const ScalarField b = ScalarField::sample(g, [](double x, double y, double) {
    return std::cos(x) * std::sin(y);
  });
  const ScalarField p = product(a, b);
  const ScalarField ref = ScalarField::sample(g, [](double x, double y, double) {
    return std::sin(2.0 * x) * std::cos(x) * std::sin(y);
  });
  EXPECT_LE(oracle::max_diff(p.physical(), ref.physical()), 1e-13);
}

TEST(Norms, PlancherelAgreesWithQuadrature) {
  const Grid g = box(16);
  const ScalarField f = oracle::noise(g, 12);
  EXPECT_NEAR(l2_norm(f), l2_norm_spectral(f), 1e-12 * l2_norm(f));
}

TEST(Norms, ConstantField) {
  const Grid g(8, 2.0);
  const ScalarField f = ScalarField::sample(g, [](double, double, double) { return 3.0; });
  EXPECT_NEAR(l2_norm(f), 3.0 * std::sqrt(8.0), 1e-13);
  EXPECT_NEAR(mean(f), 3.0, 1e-15);
}

TEST(Fields, GridMismatchIsRejected) {
  const ScalarField a = oracle::noise(box(8), 1), b = oracle::noise(box(16), 1);
  EXPECT_THROW(a + b, GridMismatch);
  EXPECT_THROW(ScalarField::from_physical(box(8), std::vector<double>(10)), GridMismatch);
}

TEST(Fields, SpectralAndPhysicalArithmeticAgree) {
  const Grid g = box(16);
  const ScalarField a = oracle::noise(g, 2), b = oracle::noise(g, 3);
  a.spectral();
  b.spectral();
  const ScalarField s = a + 2.0 * b;
  const ScalarField ap = ScalarField::from_physical(g, a.physical());
  const ScalarField bp = ScalarField::from_physical(g, b.physical());
  const ScalarField t = ap + 2.0 * bp;
  EXPECT_LE(oracle::max_diff(s.physical(), t.physical()), 1e-14);
}

TEST(Summation, PairwiseSumIsDeterministic) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + i);
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NEAR(pairwise_sum(v), naive, 1e-12);
}

TEST(Summation, TimeWeightsIntegrateCubicsExactly) {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u, 17u}) {
    const double h = 0.1;
    std::vector<double> y;
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = i * h;
      y.push_back(n >= 3 ? t * t * t - t : (n == 2 ? t * t : t));
    }
    const double T = n * h;
    const double exact = n >= 3 ? T * T * T * T / 4.0 - T * T / 2.0 : (n == 2 ? T * T * T / 3.0 : T * T / 2.0);
    EXPECT_NEAR(integrate_uniform(y, h), exact, 1e-14) << "n = " << n;
  }
}

TEST(Summation, IntervalIntegralsExactForCubicsOnUnevenTimes) {
  const std::vector<double> t{0.0, 0.1, 0.25, 0.3, 0.55, 0.6, 0.9};
  auto f = [](double x) { return 2.0 * x * x * x - x * x + 0.5; };
  auto F = [](double x) { return 0.5 * x * x * x * x - x * x * x / 3.0 + 0.5 * x; };
  std::vector<double> y;
  for (double x : t) y.push_back(f(x));
  const auto parts = interval_integrals(t, y);
  ASSERT_EQ(parts.size(), t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    EXPECT_NEAR(parts[i], F(t[i + 1]) - F(t[i]), 1e-15);
}
