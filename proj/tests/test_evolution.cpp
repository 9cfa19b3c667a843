#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "mhdlab/energy.hpp"
#include "mhdlab/errors.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/spectral.hpp"
#include "oracles.hpp"

using namespace mhdlab;

namespace {

double rel(const VectorField& a, const VectorField& b) {
  const double s = l2_norm(b);
  return s > 0.0 ? l2_norm(a - b) / s : l2_norm(a - b);
}

double pair_rel(const FieldPair& a, const FieldPair& b) {
  const double du = l2_norm(a.first - b.first), db = l2_norm(a.second - b.second);
  const double nu = l2_norm(b.first), nb = l2_norm(b.second);
  return std::hypot(du, db) / std::max(std::hypot(nu, nb), 1e-300);
}

SimState start_of(const SimConfig& cfg) {
  auto [u, b] = make_initial(cfg.initial, cfg.grid, cfg.seed);
  SimState s;
  s.u = u;
  s.b = b;
  return s;
}

}  // namespace

TEST(Initial, EveryTypeIsDivergenceFreeAndDealiased) {
  const Grid g(16, 2.0 * std::numbers::pi);
  for (const char* type : {"localized", "orszag_tang", "shear", "random", "dss"}) {
    InitialSpec s;
    s.type = type;
    auto [u, b] = make_initial(s, g, 3);
    EXPECT_LE(relative_divergence(u), 1e-12) << type;
    EXPECT_LE(relative_divergence(b), 1e-12) << type;
    EXPECT_GT(l2_norm(u), 0.0) << type;
    const VectorField du = dealias(u);
    EXPECT_LE(rel(du, u), 1e-14) << type;
  }
  InitialSpec bad;
  bad.type = "vortex";
  EXPECT_THROW(make_initial(bad, g, 0), DomainError);
}

TEST(Initial, RandomDataDependsOnSeedOnly) {
  const Grid g(16, 2.0 * std::numbers::pi);
  InitialSpec s;
  s.type = "random";
  auto a = make_initial(s, g, 5), b = make_initial(s, g, 5), c = make_initial(s, g, 6);
  EXPECT_EQ(rel(a.first, b.first), 0.0);
  EXPECT_GT(rel(a.first, c.first), 0.1);
}

TEST(Duhamel, IdentityAtTimeZero) {
  const auto cfg = oracle::small_config();
  auto [u, b] = make_initial(cfg.initial, cfg.grid, 1);
  auto r = duhamel_linear_part(u, b, ForcingSpec(), ForcingSpec(), 0.0);
  EXPECT_EQ(rel(r.first, u), 0.0);
  EXPECT_EQ(rel(r.second, b), 0.0);
}

TEST(Duhamel, SingleModeForcingClosedForm) {
  const Grid g(16, 2.0 * std::numbers::pi);
  const std::array<int, 3> k{1, 2, 0};
  const std::array<double, 9> amp{0.3, -0.7, 0.2, 0.5, 0.1, -0.4, 0.9, 0.6, -0.2};
  ForcingSpec F;
  F.fn = [&](double, const Point& x) {
    std::array<double, 9> e;
    const double s = std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    for (int i = 0; i < 9; ++i) e[i] = amp[i] * s;
    return e;
  };
  const double t = 0.3;
  const VectorField zero(g);
  auto r = duhamel_linear_part(zero, zero, F, ForcingSpec(), t);
  // div F_j = sum_i a_ij k_i cos(k.x); project and apply (1 - e^{-|k|^2 t}) / |k|^2
  const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  std::array<double, 3> e{};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) e[j] += amp[3 * i + j] * k[i];
  const double ek = (e[0] * k[0] + e[1] * k[1] + e[2] * k[2]) / k2;
  const double m = (1.0 - std::exp(-k2 * t)) / k2;
  for (int j = 0; j < 3; ++j) {
    const double c = m * (e[j] - ek * k[j]);
    const ScalarField ref = ScalarField::sample(g, [&](double x, double y, double z) {
      return c * std::cos(k[0] * x + k[1] * y + k[2] * z);
    });
    EXPECT_LE(oracle::max_diff(r.first[j].physical(), ref.physical()), 1e-12);
  }
  EXPECT_TRUE(r.second.is_zero() || l2_norm(r.second) == 0.0);
  EXPECT_LE(relative_divergence(r.first), 1e-12);
}

TEST(Bilinear, ZeroAndCancellation) {
  const auto cfg = oracle::small_config();
  const Grid& g = cfg.grid;
  auto [u, b] = make_initial(cfg.initial, g, 2);
  auto z = bilinear_terms(VectorField(g), VectorField(g), u, b);
  EXPECT_EQ(l2_norm(z.first), 0.0);
  auto c = bilinear_terms(u, u, b, b);
  EXPECT_LE(l2_norm(c.first), 1e-14 * l2_norm(u) * l2_norm(b));
}

TEST(Bilinear, SingleModeProductOracle) {
  const Grid g(16, 2.0 * std::numbers::pi);
  // v = (0, 0, sin x), u = (0, sin z, 0): (v.grad)u = (0, sin x cos z, 0)
  const VectorField v{ScalarField(g), ScalarField(g),
                      ScalarField::sample(g, [](double x, double, double) { return std::sin(x); })};
  const VectorField u{ScalarField(g),
                      ScalarField::sample(g, [](double, double, double z) { return std::sin(z); }),
                      ScalarField(g)};
  auto r = bilinear_terms(u, VectorField(g), v, VectorField(g));
  const VectorField raw{ScalarField(g),
                        ScalarField::sample(g, [](double x, double, double z) {
                          return std::sin(x) * std::cos(z);
                        }),
                        ScalarField(g)};
  const VectorField ref = leray_project(raw);
  EXPECT_LE(rel(r.first, ref), 1e-13);
  EXPECT_THROW(bilinear_terms(u, u, VectorField(Grid(8, 1.0)), v), GridMismatch);
}

TEST(ExistenceTime, Scalings) {
  const auto cfg = oracle::small_config();
  auto [u, b] = make_initial(cfg.initial, cfg.grid, 1);
  const double T = 1e9;
  const double t1 = existence_time(u, b, 0.0, 0.5, 1.0, T);
  EXPECT_NEAR(existence_time(2.0 * u, 2.0 * b, 0.0, 0.5, 1.0, T), t1 / 4.0, 1e-15 * t1);
  EXPECT_NEAR(existence_time(u, b, 0.0, 1.0, 1.0, T), 8.0 * t1, 1e-14 * t1);
  EXPECT_EQ(existence_time(u, b, 0.0, 0.5, 1.0, 1e-12), 1e-12);
  const Grid& g = cfg.grid;
  EXPECT_EQ(existence_time(VectorField(g), VectorField(g), 0.0, 0.5, 1.0, 3.0), 3.0);
  EXPECT_THROW(existence_time(u, b, 0.0, 0.5, 0.0, 1.0), DomainError);
}

TEST(ExpMoments, MatchQuadrature) {
  for (double z : {0.0, 1e-6, 0.3, 0.99, 1.0, 4.0, 60.0}) {
    const auto m = exp_moments(z);
    for (int p = 0; p < 4; ++p) {
      auto f = [&](double s) { return std::exp(-z * (1.0 - s)) * std::pow(s, p); };
      const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0);
      EXPECT_NEAR(m[p], ref, 1e-14 * std::max(1.0, ref)) << "z=" << z << " p=" << p;
    }
  }
}

TEST(Picard, ZeroDataIsFixedPoint) {
  auto cfg = oracle::small_config(16, "zero");
  cfg.dt = 1e-3;
  const auto r = picard_solve(cfg, 0.0, 8e-3);
  EXPECT_LE(r.iterations, 1);
  for (const auto& s : r.trajectory.states) EXPECT_EQ(l2_norm(s.u), 0.0);
}

TEST(Picard, ShearDecaysByHeatFlow) {
  auto cfg = oracle::small_config(16, "shear");
  cfg.dt = 0.01;
  cfg.picard.tol = 1e-13;
  const auto r = picard_solve(cfg, 0.0, 0.08);
  const auto& s = r.trajectory.states.back();
  EXPECT_NEAR(s.t, 0.08, 1e-15);
  auto [u0, b0] = make_initial(cfg.initial, cfg.grid, cfg.seed);
  EXPECT_LE(rel(s.u, heat_propagate(u0, s.t)), 1e-8);
}

TEST(Picard, StartsAgreeAndContract) {
  auto cfg = oracle::small_config();
  cfg.dt = 2.5e-3;
  cfg.picard.tol = 1e-11;
  const SimState st = start_of(cfg);
  const auto a = picard_solve(cfg, st, 0.02, PicardStart::linear);
  const auto z = picard_solve(cfg, st, 0.02, PicardStart::zero);
  const auto p = picard_solve(cfg, st, 0.02, PicardStart::perturbed);
  EXPECT_LT(a.contraction, 1.0);
  const auto& sa = a.trajectory.states.back();
  for (const auto* o : {&z, &p}) {
    const auto& so = o->trajectory.states.back();
    EXPECT_LE(pair_rel({so.u, so.b}, {sa.u, sa.b}), 10.0 * cfg.picard.tol);
  }
}

TEST(Picard, DivergenceCarriesHistory) {
  auto cfg = oracle::small_config();
  cfg.initial.amplitude = 200.0;
  cfg.dt = 0.05;
  cfg.picard.max_iters = 5;
  testing::internal::CaptureStderr();
  try {
    picard_solve(cfg, 0.0, 0.4);
    testing::internal::GetCapturedStderr();
    FAIL() << "expected a Picard divergence";
  } catch (const PicardDivergence& e) {
    const std::string err = testing::internal::GetCapturedStderr();
    EXPECT_FALSE(e.history().empty());
    EXPECT_NE(err.find("existence time"), std::string::npos);
  }
}

TEST(Step, ZeroStateStaysZero) {
  const auto cfg = oracle::small_config(16, "zero");
  const SimState s = step(start_of(cfg), cfg.dt, cfg);
  EXPECT_EQ(l2_norm(s.u), 0.0);
  EXPECT_EQ(l2_norm(s.b), 0.0);
  EXPECT_NEAR(s.t, cfg.dt, 0.0);
}

TEST(Step, ShearIsExactHeatFlow) {
  auto cfg = oracle::small_config(16, "shear");
  SimState s = start_of(cfg);
  const VectorField u0 = s.u;
  for (int i = 0; i < 10; ++i) s = step(s, cfg.dt, cfg);
  EXPECT_LE(rel(s.u, heat_propagate(u0, s.t)), 1e-13);
}

TEST(Step, LinearRegimeMatchesHeatDecay) {
  auto cfg = oracle::small_config();
  cfg.initial.amplitude = 1e-8;
  SimState s = start_of(cfg);
  const VectorField u0 = s.u, b0 = s.b;
  for (int i = 0; i < 10; ++i) s = step(s, cfg.dt, cfg);
  // the nonlinear correction is O(amplitude) relative to the data
  EXPECT_LE(rel(s.u, heat_propagate(u0, s.t)), 1e-9);
  EXPECT_LE(rel(s.b, heat_propagate(b0, s.t)), 1e-9);
}

TEST(Step, FourthOrderAgainstPicardReference) {
  auto cfg = oracle::small_config();
  cfg.initial.amplitude = 4.0;
  const double T = 0.04;
  auto ref_cfg = cfg;
  ref_cfg.dt = T / 64;
  ref_cfg.picard.tol = 1e-14;
  ref_cfg.picard.max_iters = 200;
  testing::internal::CaptureStderr();
  const auto ref = picard_solve(ref_cfg, 0.0, T).trajectory.states.back();
  testing::internal::GetCapturedStderr();
  std::vector<double> err;
  for (int m : {2, 4, 8}) {
    SimState s = start_of(cfg);
    for (int i = 0; i < m; ++i) s = step(s, T / m, cfg);
    err.push_back(pair_rel({s.u, s.b}, {ref.u, ref.b}));
  }
  EXPECT_GT(err[0] / err[1], 8.0);  // order >= 3 observed
  EXPECT_GT(err[1] / err[2], 8.0);
}

TEST(Step, PreservesDivergenceAndDissipatesEnergy) {
  auto cfg = oracle::small_config();
  SimState s = start_of(cfg);
  double e0 = std::hypot(l2_norm(s.u), l2_norm(s.b));
  for (int i = 0; i < 5; ++i) {
    s = step(s, cfg.dt, cfg);
    EXPECT_LE(relative_divergence(s.u), 1e-12);
    const double e = std::hypot(l2_norm(s.u), l2_norm(s.b));
    EXPECT_LT(e, e0);
    e0 = e;
  }
}

TEST(Step, BlowUpKeepsLastFiniteState) {
  auto cfg = oracle::small_config();
  cfg.initial.amplitude = 1e6;
  SimState s = start_of(cfg);
  try {
    for (int i = 0; i < 50; ++i) s = step(s, 0.5, cfg);
    FAIL() << "expected blow-up";
  } catch (const BlowUp& e) {
    EXPECT_TRUE(all_finite(e.last_valid().u));
  }
}

TEST(Solve, TrajectoryInvariants) {
  auto cfg = oracle::small_config();
  cfg.snapshot_every = 2;
  const auto tr = solve_mhdg(cfg);
  ASSERT_EQ(tr.states.size(), 6u);
  for (std::size_t i = 1; i < tr.states.size(); ++i) EXPECT_GT(tr.states[i].t, tr.states[i - 1].t);
  EXPECT_NEAR(tr.states.back().t, cfg.t_end, 1e-15);
  EXPECT_EQ(tr.rows.size(), 11u);
  for (const auto& s : tr.states) {
    EXPECT_LE(relative_divergence(s.u), 1e-10);
    EXPECT_LE(relative_divergence(s.b), 1e-10);
    EXPECT_LE(std::abs(mean(s.p)), 1e-13 * std::max(1.0, max_abs(s.p)));
    EXPECT_LE(std::abs(mean(s.q)), 1e-13 * std::max(1.0, max_abs(s.q)));
  }
}

TEST(Solve, RejectsStepThatDoesNotDivideTheWindow) {
  auto cfg = oracle::small_config();
  cfg.t_end = 0.0105;
  EXPECT_THROW(solve_mhdg(cfg), DomainError);
}

TEST(Solve, EnergyNonIncreasingWithoutForcing) {
  auto cfg = oracle::small_config(16, "localized");
  const auto tr = solve_mhdg(cfg);
  for (std::size_t i = 1; i < tr.rows.size(); ++i)
    EXPECT_LE(tr.rows[i].ledgers[0].second.energy, tr.rows[i - 1].ledgers[0].second.energy);
}

TEST(Solve, PicardDriverAgreesWithRk4) {
  auto cfg = oracle::small_config();
  auto pc = cfg;
  pc.driver = Driver::picard;
  pc.picard.window_steps = 5;
  pc.picard.tol = 1e-12;
  testing::internal::CaptureStderr();
  const auto a = solve_mhdg(cfg), b = solve_mhdg(pc);
  testing::internal::GetCapturedStderr();
  ASSERT_EQ(a.states.size(), b.states.size());
  const auto& sa = a.states.back();
  const auto& sb = b.states.back();
  EXPECT_LE(pair_rel({sa.u, sa.b}, {sb.u, sb.b}), 1e-8);
}

TEST(Solve, ShortTrailingPicardWindow) {
  // 10 steps in windows of 4 leaves a 2-step window at the end
  auto cfg = oracle::small_config();
  auto pc = cfg;
  pc.driver = Driver::picard;
  pc.picard.window_steps = 4;
  pc.picard.tol = 1e-12;
  const auto a = solve_mhdg(cfg), b = solve_mhdg(pc);
  const auto& sa = a.states.back();
  const auto& sb = b.states.back();
  EXPECT_LE(pair_rel({sa.u, sa.b}, {sb.u, sb.b}), 1e-8);
}

TEST(AdvectionDiffusion, ZeroDriftsGiveHeatFlow) {
  auto cfg = oracle::small_config();
  const SimState s0 = start_of(cfg);
  std::vector<DriftSample> d;
  const long n = std::lround(cfg.t_end / cfg.dt);
  for (long i = 0; i <= n; ++i) d.push_back({i * cfg.dt, VectorField(cfg.grid), VectorField(cfg.grid)});
  const auto tr = solve_ad(cfg, s0, d);
  const auto& s = tr.states.back();
  EXPECT_LE(rel(s.u, heat_propagate(s0.u, s.t)), 1e-12);
  EXPECT_LE(rel(s.b, heat_propagate(s0.b, s.t)), 1e-12);
}

TEST(AdvectionDiffusion, OwnDriftsReproduceTheSolution) {
  auto cfg = oracle::small_config();
  cfg.driver = Driver::picard;
  cfg.picard.tol = 1e-12;
  cfg.picard.window_steps = 5;
  testing::internal::CaptureStderr();
  const auto tr = solve_mhdg(cfg);
  const auto ad = solve_ad(cfg, tr.states.front(), drifts_of(tr));
  testing::internal::GetCapturedStderr();
  ASSERT_EQ(ad.states.size(), tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i)
    EXPECT_LE(pair_rel({ad.states[i].u, ad.states[i].b}, {tr.states[i].u, tr.states[i].b}),
              10.0 * cfg.picard.tol);
}

TEST(AdvectionDiffusion, DriftChecks) {
  auto cfg = oracle::small_config();
  const SimState s0 = start_of(cfg);
  std::vector<DriftSample> d{{0.0, VectorField(cfg.grid), VectorField(cfg.grid)}};
  EXPECT_THROW(solve_ad(cfg, s0, d), Error);
  const long n = std::lround(cfg.t_end / cfg.dt);
  d.clear();
  const VectorField compressible{
      ScalarField::sample(cfg.grid, [](double x, double, double) { return std::sin(x); }),
      ScalarField(cfg.grid), ScalarField(cfg.grid)};
  for (long i = 0; i <= n; ++i) d.push_back({i * cfg.dt, compressible, VectorField(cfg.grid)});
  EXPECT_THROW(solve_ad(cfg, s0, d), DomainError);
}

TEST(AdvectionDiffusion, TransportTermsFollowTheDrifts) {
  auto cfg = oracle::small_config();
  cfg.ledger_gammas = {1.0};
  const SimState s0 = start_of(cfg);
  const long n = std::lround(cfg.t_end / cfg.dt);
  std::vector<DriftSample> only_v, only_c;
  for (long i = 0; i <= n; ++i) {
    only_v.push_back({i * cfg.dt, s0.u, VectorField(cfg.grid)});
    only_c.push_back({i * cfg.dt, VectorField(cfg.grid), s0.u});
  }
  const auto a = solve_ad(cfg, s0, only_v), b = solve_ad(cfg, s0, only_c);
  const auto la = weighted_energy_ledger(a, 1.0, 0.0, cfg.t_end);
  const auto lb = weighted_energy_ledger(b, 1.0, 0.0, cfg.t_end);
  EXPECT_EQ(la.term("transport_c"), 0.0);
  EXPECT_NE(la.term("transport_v"), 0.0);
  EXPECT_EQ(lb.term("transport_v"), 0.0);
  EXPECT_NE(lb.term("transport_c"), 0.0);
}

TEST(EpsStudy, DegenerateAndInvalidLists) {
  auto cfg = oracle::small_config();
  cfg.snapshot_every = 5;
  const auto one = epsilon_convergence_study(cfg, {0.3 * cfg.grid.length()});
  EXPECT_TRUE(one.distances.empty());
  const double L = cfg.grid.length();
  EXPECT_THROW(epsilon_convergence_study(cfg, {0.2 * L, 0.3 * L}), DomainError);
  EXPECT_THROW(epsilon_convergence_study(cfg, {0.2 * L, 0.01 * L}), UnderResolvedKernel);
}

TEST(EpsStudy, LinearRegimeDistancesVanish) {
  auto cfg = oracle::small_config();
  cfg.initial.amplitude = 1e-8;
  cfg.snapshot_every = 5;
  const double L = cfg.grid.length();
  const auto s = epsilon_convergence_study(cfg, {0.4 * L, 0.2 * L, 0.1 * L});
  ASSERT_EQ(s.distances.size(), 2u);
  for (double d : s.distances) EXPECT_LE(d, 1e-15);
}

TEST(Calibration, EmptyBatteryRejected) {
  EXPECT_THROW(calibrate_existence_constant({}), DomainError);
}
