#include "mhdlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "internal.hpp"
#include "mhdlab/energy.hpp"
#include "mhdlab/fft.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/summation.hpp"

namespace mhdlab {
namespace detail {

FieldPair tensor_divergences(const VectorField& u, const VectorField& b,
                             const VectorField& v, const VectorField& c) {
  const Grid& g = u.grid();
  require_same_grid(g, b.grid(), "bilinear terms");
  require_same_grid(g, v.grid(), "bilinear terms");
  require_same_grid(g, c.grid(), "bilinear terms");
  if ((u.is_zero() && b.is_zero()) || (v.is_zero() && c.is_zero()))
    return {VectorField(g), VectorField(g)};
  const int n = g.n();
  const std::size_t size = g.size();
  std::vector<double> kx(n);
  std::vector<char> keep(n);
  const int cut = g.dealias_cutoff();
  for (int i = 0; i < n; ++i) {
    kx[i] = i == n / 2 ? 0.0 : g.mode(i) * g.wavenumber_unit();
    keep[i] = std::abs(g.mode(i)) <= cut;
  }
  const std::vector<double>* U[3];
  const std::vector<double>* B[3];
  const std::vector<double>* V[3];
  const std::vector<double>* C[3];
  for (int a = 0; a < 3; ++a) {
    U[a] = &u[a].physical();
    B[a] = &b[a].physical();
    V[a] = &v[a].physical();
    C[a] = &c[a].physical();
  }
  std::array<std::vector<cplx>, 3> du, db;
  for (int j = 0; j < 3; ++j) {
    du[j].assign(size, cplx(0.0, 0.0));
    db[j].assign(size, cplx(0.0, 0.0));
  }
  std::vector<double> prod(size);
  std::vector<cplx> spec(size);
  auto accumulate = [&](int i, std::vector<cplx>& acc) {
    fft::forward(n, prod.data(), spec.data());
    std::size_t idx = 0;
    for (int z = 0; z < n; ++z)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x, ++idx) {
          if (!(keep[x] && keep[y] && keep[z])) continue;
          const double k = i == 0 ? kx[x] : (i == 1 ? kx[y] : kx[z]);
          acc[idx] += cplx(0.0, k) * spec[idx];
        }
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto &vi = *V[i], &ci = *C[i], &uj = *U[j], &bj = *B[j];
      for (std::size_t x = 0; x < size; ++x) prod[x] = vi[x] * uj[x] - ci[x] * bj[x];
      accumulate(i, du[j]);
      for (std::size_t x = 0; x < size; ++x) prod[x] = vi[x] * bj[x] - ci[x] * uj[x];
      accumulate(i, db[j]);
    }
  auto make = [&](std::array<std::vector<cplx>, 3>& a) {
    return VectorField(ScalarField::from_spectral(g, std::move(a[0])),
                       ScalarField::from_spectral(g, std::move(a[1])),
                       ScalarField::from_spectral(g, std::move(a[2])));
  };
  return {make(du), make(db)};
}

double pair_norm(const FieldPair& x) {
  const double a = l2_norm_spectral(x.first);
  const double b = l2_norm_spectral(x.second);
  return std::sqrt(a * a + b * b);
}

double pair_distance(const FieldPair& x, const FieldPair& y) {
  return pair_norm({x.first - y.first, x.second - y.second});
}

long checked_steps(double span, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(span > 0.0)) throw DomainError("time span must be positive");
  const double r = span / dt;
  const long steps = std::lround(r);
  if (steps < 1 || std::abs(r - steps) > 1e-9 * std::max(1.0, r))
    throw DomainError("time span is not an integer multiple of dt");
  return steps;
}

double integrate_samples(const std::vector<double>& t, const std::vector<double>& y) {
  const auto parts = interval_integrals(t, y);
  return pairwise_sum(parts);
}

}  // namespace detail

using detail::checked_steps;

MhdSystem::MhdSystem(const SimConfig& cfg) : cfg_(cfg) {
  if (cfg_.variant == MollifierVariant::fixed) kernel_at(0.0);
  F_cache_ = TensorField(cfg_.grid);
  G_cache_ = TensorField(cfg_.grid);
}

const Kernel& MhdSystem::kernel_at(double t) const {
  double scale = cfg_.epsilon;
  if (cfg_.variant == MollifierVariant::time_scaled)
    scale = std::max(cfg_.epsilon * std::sqrt(std::max(t, 0.0)),
                     resolvability_threshold(cfg_.grid));
  if (!kernel_ || scale != kernel_scale_) {
    kernel_ = std::make_unique<Kernel>(make_kernel(cfg_.kernel, scale, cfg_.grid));
    kernel_scale_ = scale;
  }
  return *kernel_;
}

FieldPair MhdSystem::drifts(double t, const VectorField& u, const VectorField& b) const {
  const Kernel& k = kernel_at(t);
  return {mollify(u, k), mollify(b, k)};
}

namespace {
const TensorField& cached_forcing(const ForcingSpec& spec, const Grid& g, double t,
                                  TensorField& cache, double& when, bool& valid) {
  if (spec.is_zero()) return cache;
  if (valid && (!spec.time_dependent || when == t)) return cache;
  cache = sample_forcing(spec, g, t);
  when = t;
  valid = true;
  return cache;
}
}  // namespace

const TensorField& MhdSystem::forcing_F(double t) const {
  return cached_forcing(cfg_.F, cfg_.grid, t, F_cache_, F_time_, F_valid_);
}

const TensorField& MhdSystem::forcing_G(double t) const {
  return cached_forcing(cfg_.G, cfg_.grid, t, G_cache_, G_time_, G_valid_);
}

FieldPair MhdSystem::rhs_with_drifts(double t, const VectorField& u, const VectorField& b,
                                     const VectorField& v, const VectorField& c,
                                     bool with_forcing) const {
  auto [du, db] = detail::tensor_divergences(u, b, v, c);
  VectorField ru = -1.0 * du;
  VectorField rb = -1.0 * db;
  if (with_forcing) {
    const TensorField& F = forcing_F(t);
    const TensorField& G = forcing_G(t);
    if (!F.is_zero()) ru = ru + divergence(F);
    if (!G.is_zero()) rb = rb + divergence(G);
  }
  return {leray_project(ru), leray_project(rb)};
}

FieldPair MhdSystem::rhs_nonlinear(double t, const VectorField& u,
                                   const VectorField& b) const {
  auto [v, c] = drifts(t, u, b);
  return rhs_with_drifts(t, u, b, v, c, true);
}

const std::vector<double>& MhdSystem::heat_multiplier(double tau) const {
  auto it = heat_.find(tau);
  if (it != heat_.end()) return it->second;
  const Grid& g = cfg_.grid;
  const int n = g.n();
  std::vector<double> m(g.size());
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        const double a = g.mode(i) * g.wavenumber_unit();
        const double b = g.mode(j) * g.wavenumber_unit();
        const double c = g.mode(k) * g.wavenumber_unit();
        m[idx] = std::exp(-(a * a + b * b + c * c) * tau);
      }
  if (heat_.size() > 16) heat_.clear();
  return heat_.emplace(tau, std::move(m)).first->second;
}

VectorField MhdSystem::heat(const VectorField& f, double tau) const {
  const std::vector<double>& m = heat_multiplier(tau);
  const int n = cfg_.grid.n();
  auto one = [&](const ScalarField& s) {
    return apply_multiplier(s, [&](int i, int j, int k) {
      return m[static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n) * (j + static_cast<std::size_t>(n) * k)];
    });
  };
  return VectorField(one(f[0]), one(f[1]), one(f[2]));
}

SimState MhdSystem::complete_with_drifts(double t, VectorField u, VectorField b,
                                         VectorField v, VectorField c) const {
  SimState s;
  s.t = t;
  s.F = forcing_F(t);
  s.G = forcing_G(t);
  auto [p, q] = compute_p_q(u, b, v, c, s.F, s.G);
  s.u = std::move(u);
  s.b = std::move(b);
  s.v = std::move(v);
  s.c = std::move(c);
  s.p = std::move(p);
  s.q = std::move(q);
  return s;
}

SimState MhdSystem::complete(double t, VectorField u, VectorField b) const {
  auto [v, c] = drifts(t, u, b);
  return complete_with_drifts(t, std::move(u), std::move(b), std::move(v), std::move(c));
}

FieldPair bilinear_terms(const VectorField& u, const VectorField& b, const VectorField& v,
                         const VectorField& c) {
  auto [du, db] = detail::tensor_divergences(u, b, v, c);
  return {leray_project(du), leray_project(db)};
}

double existence_time(const VectorField& u0, const VectorField& b0, double forcing_l2l2,
                      double epsilon, double c_cal, double T1) {
  if (!(c_cal > 0.0)) throw DomainError("existence_time: c must be positive");
  const double a = l2_norm(u0), b = l2_norm(b0);
  const double d = std::sqrt(a * a + b * b) + forcing_l2l2;
  if (d == 0.0) return T1;
  return std::min(T1, c_cal * epsilon * epsilon * epsilon / (d * d));
}

double forcing_l2l2_norm(const SimConfig& cfg, double T, int steps) {
  if (cfg.F.is_zero() && cfg.G.is_zero()) return 0.0;
  std::vector<double> t(steps + 1), y(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    t[i] = T * i / steps;
    double s = 0.0;
    for (const ForcingSpec* f : {&cfg.F, &cfg.G}) {
      const TensorField F = sample_forcing(*f, cfg.grid, t[i]);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double n = l2_norm(F.at(a, b));
          s += n * n;
        }
    }
    y[i] = s;
  }
  return std::sqrt(detail::integrate_samples(t, y));
}

namespace {

struct Stepped {
  bool ok;
  FieldPair next;
};

Stepped advance(double t, const VectorField& u, const VectorField& b, double h,
                const MhdSystem& sys) {
  const double h2 = 0.5 * h;
  auto [k1u, k1b] = sys.rhs_nonlinear(t, u, b);
  const VectorField u2 = sys.heat(u + h2 * k1u, h2);
  const VectorField b2 = sys.heat(b + h2 * k1b, h2);
  auto [k2u, k2b] = sys.rhs_nonlinear(t + h2, u2, b2);
  const VectorField Ehu = sys.heat(u, h2);
  const VectorField Ehb = sys.heat(b, h2);
  const VectorField u3 = Ehu + h2 * k2u;
  const VectorField b3 = Ehb + h2 * k2b;
  auto [k3u, k3b] = sys.rhs_nonlinear(t + h2, u3, b3);
  const VectorField Eu = sys.heat(u, h);
  const VectorField Eb = sys.heat(b, h);
  const VectorField u4 = Eu + h * sys.heat(k3u, h2);
  const VectorField b4 = Eb + h * sys.heat(k3b, h2);
  auto [k4u, k4b] = sys.rhs_nonlinear(t + h, u4, b4);
  const double h6 = h / 6.0;
  VectorField un = Eu + h6 * (sys.heat(k1u, h) + 2.0 * sys.heat(k2u + k3u, h2) + k4u);
  VectorField bn = Eb + h6 * (sys.heat(k1b, h) + 2.0 * sys.heat(k2b + k3b, h2) + k4b);
  const bool ok = all_finite(un) && all_finite(bn);
  return {ok, {std::move(un), std::move(bn)}};
}

void strip_derived(SimState& s) {
  const Grid& g = s.u.grid();
  s.v = VectorField(g);
  s.c = VectorField(g);
  s.p = ScalarField(g);
  s.q = ScalarField(g);
  s.F = TensorField(g);
  s.G = TensorField(g);
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw DomainError("dt must be positive");
  if (cfg.snapshot_every < 1 || cfg.ledger_every < 1)
    throw DomainError("snapshot_every and ledger_every must be >= 1");
}

}  // namespace

SimState step(const SimState& s, double dt, const MhdSystem& sys) {
  Stepped r = advance(s.t, s.u, s.b, dt, sys);
  if (!r.ok) throw BlowUp("step: non-finite values", s);
  return sys.complete(s.t + dt, std::move(r.next.first), std::move(r.next.second));
}

SimState step(const SimState& s, double dt, const SimConfig& cfg) {
  const MhdSystem sys(cfg);
  return step(s, dt, sys);
}

Trajectory solve_mhdg(const SimConfig& cfg) {
  auto [u, b] = make_initial(cfg.initial, cfg.grid, cfg.seed);
  SimState s;
  s.t = 0.0;
  s.u = std::move(u);
  s.b = std::move(b);
  return solve_mhdg(cfg, s);
}

namespace {

struct Recorder {
  const SimConfig& cfg;
  const MhdSystem& sys;
  long steps;
  Trajectory traj;

  bool wants(long n) const {
    return n % cfg.ledger_every == 0 || n % cfg.snapshot_every == 0 || n == steps;
  }
  void record(long n, SimState st) {
    if (n % cfg.ledger_every == 0 || n == steps)
      traj.rows.push_back(diagnostics_row(st, cfg.ledger_gammas, cfg.local_tests));
    if (n % cfg.snapshot_every == 0 || n == steps) {
      if (!cfg.keep_derived) strip_derived(st);
      st.compact();
      traj.states.push_back(std::move(st));
    }
  }
};

}  // namespace

Trajectory solve_mhdg(const SimConfig& cfg, const SimState& initial) {
  check_config(cfg);
  const double t0 = initial.t;
  const long steps = checked_steps(cfg.t_end - t0, cfg.dt);
  const MhdSystem sys(cfg);
  Recorder rec{cfg, sys, steps, {}};
  rec.traj.gammas = cfg.ledger_gammas;
  rec.traj.local_tests = cfg.local_tests;
  VectorField u = initial.u, b = initial.b;
  rec.record(0, sys.complete(t0, u, b));
  if (cfg.driver == Driver::rk4) {
    for (long n = 1; n <= steps; ++n) {
      const double t = t0 + (n - 1) * cfg.dt;
      Stepped r = advance(t, u, b, cfg.dt, sys);
      if (!r.ok) throw BlowUp("solve_mhdg: non-finite values", sys.complete(t, u, b));
      u = std::move(r.next.first);
      b = std::move(r.next.second);
      if (rec.wants(n)) rec.record(n, sys.complete(t0 + n * cfg.dt, u, b));
    }
    return std::move(rec.traj);
  }
  const long W = std::max(1, cfg.picard.window_steps);
  for (long n0 = 0; n0 < steps; n0 += W) {
    const int M = static_cast<int>(std::min(W, steps - n0));
    const double ta = t0 + n0 * cfg.dt;
    const detail::NodeOp bil = [&](int m, const FieldPair& U) {
      const double t = ta + m * cfg.dt;
      auto [v, c] = sys.drifts(t, U.first, U.second);
      return sys.rhs_with_drifts(t, U.first, U.second, v, c, false);
    };
    auto w = detail::picard_window(sys, {u, b}, ta, cfg.dt, M, bil, PicardStart::linear,
                                   cfg.picard.tol, cfg.picard.max_iters);
    for (int m = 1; m <= M; ++m)
      if (rec.wants(n0 + m))
        rec.record(n0 + m, sys.complete(t0 + (n0 + m) * cfg.dt, w.nodes[m].first,
                                        w.nodes[m].second));
    u = w.nodes[M].first;
    b = w.nodes[M].second;
  }
  return std::move(rec.traj);
}

std::vector<DriftSample> drifts_of(const Trajectory& traj) {
  std::vector<DriftSample> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back({s.t, s.v, s.c});
  return out;
}

Trajectory solve_ad(const SimConfig& cfg, const SimState& initial,
                    const std::vector<DriftSample>& drifts) {
  check_config(cfg);
  const double t0 = initial.t;
  const long steps = checked_steps(cfg.t_end - t0, cfg.dt);
  if (drifts.size() != static_cast<std::size_t>(steps + 1))
    throw Error("solve_ad: drifts must be given at every time node");
  for (long n = 0; n <= steps; ++n) {
    const auto& d = drifts[n];
    if (std::abs(d.t - (t0 + n * cfg.dt)) > 1e-9 * cfg.dt)
      throw Error("solve_ad: drift time does not match the time grid");
    require_same_grid(d.v.grid(), cfg.grid, "solve_ad drift v");
    require_same_grid(d.c.grid(), cfg.grid, "solve_ad drift c");
    if (relative_divergence(d.v) > 1e-8 || relative_divergence(d.c) > 1e-8)
      throw DomainError("solve_ad: drifts must be divergence-free");
  }
  const MhdSystem sys(cfg);
  Recorder rec{cfg, sys, steps, {}};
  rec.traj.gammas = cfg.ledger_gammas;
  rec.traj.local_tests = cfg.local_tests;
  VectorField u = initial.u, b = initial.b;
  rec.record(0, sys.complete_with_drifts(t0, u, b, drifts[0].v, drifts[0].c));
  const long W = std::max(1, cfg.picard.window_steps);
  for (long n0 = 0; n0 < steps; n0 += W) {
    const int M = static_cast<int>(std::min(W, steps - n0));
    const double ta = t0 + n0 * cfg.dt;
    const detail::NodeOp op = [&](int m, const FieldPair& U) {
      const auto& d = drifts[n0 + m];
      return sys.rhs_with_drifts(ta + m * cfg.dt, U.first, U.second, d.v, d.c, false);
    };
    auto w = detail::picard_window(sys, {u, b}, ta, cfg.dt, M, op, PicardStart::linear,
                                   cfg.picard.tol, cfg.picard.max_iters);
    for (int m = 1; m <= M; ++m)
      if (rec.wants(n0 + m)) {
        const auto& d = drifts[n0 + m];
        rec.record(n0 + m, sys.complete_with_drifts(t0 + (n0 + m) * cfg.dt, w.nodes[m].first,
                                                    w.nodes[m].second, d.v, d.c));
      }
    u = w.nodes[M].first;
    b = w.nodes[M].second;
  }
  return std::move(rec.traj);
}

EpsStudy epsilon_convergence_study(const SimConfig& cfg, const std::vector<double>& eps_list) {
  EpsStudy out;
  out.eps = eps_list;
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw DomainError("eps_list must be strictly decreasing");
  for (double e : eps_list)
    if (e < resolvability_threshold(cfg.grid))
      throw UnderResolvedKernel("eps-study: scale " + std::to_string(e) +
                                " is below the resolvability threshold");
  SimConfig c = cfg;
  c.keep_derived = false;
  c.ledger_gammas.clear();
  c.local_tests.clear();
  c.ledger_every = c.snapshot_every;
  std::vector<SimState> prev;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    c.epsilon = eps_list[i];
    Trajectory tr = solve_mhdg(c);
    if (i > 0) {
      std::vector<double> t, y;
      for (std::size_t s = 0; s < tr.states.size(); ++s) {
        const auto& a = prev[s];
        const auto& b = tr.states[s];
        const double du = l2_norm(a.u - b.u), db = l2_norm(a.b - b.b);
        t.push_back(b.t);
        y.push_back(du * du + db * db);
      }
      out.distances.push_back(std::sqrt(detail::integrate_samples(t, y)));
    }
    prev = std::move(tr.states);
  }
  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.distances.size(); ++i)
    if (!(out.distances[i] < out.distances[i - 1])) out.strictly_decreasing = false;
  return out;
}

}  // namespace mhdlab
