#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "internal.hpp"
#include "mhdlab/energy.hpp"
#include "mhdlab/spectral.hpp"

namespace mhdlab {

std::array<double, 4> exp_moments(double z) {
  std::array<double, 4> m{};
  if (z < 1.0) {
    // M_p = p! sum_j (-z)^j / (j + p + 1)!
    for (int p = 0; p < 4; ++p) {
      double term = 1.0;
      for (int q = 1; q <= p + 1; ++q) term /= q;
      double fact_p = 1.0;
      for (int q = 2; q <= p; ++q) fact_p *= q;
      double s = 0.0;
      for (int j = 0; j < 40; ++j) {
        s += term;
        term *= -z / (j + p + 2);
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
      }
      m[p] = fact_p * s;
    }
    return m;
  }
  m[0] = -std::expm1(-z) / z;
  for (int p = 1; p < 4; ++p) m[p] = (1.0 - p * m[p - 1]) / z;
  return m;
}

namespace detail {
namespace {

// Monomial coefficients of the Lagrange basis on the given nodes.
std::vector<std::array<double, 4>> lagrange_coeffs(const std::vector<double>& nodes) {
  const std::size_t q = nodes.size();
  std::vector<std::array<double, 4>> out(q);
  for (std::size_t j = 0; j < q; ++j) {
    std::array<double, 4> c{1.0, 0.0, 0.0, 0.0};
    double denom = 1.0;
    for (std::size_t l = 0; l < q; ++l) {
      if (l == j) continue;
      std::array<double, 4> nc{};
      for (int p = 0; p < 3; ++p) {
        nc[p + 1] += c[p];
        nc[p] -= nodes[l] * c[p];
      }
      c = nc;
      denom *= nodes[j] - nodes[l];
    }
    for (auto& x : c) x /= denom;
    out[j] = c;
  }
  return out;
}

struct Stencil {
  std::vector<int> offsets;  // relative to the interval start
  std::vector<std::array<double, 4>> coeffs;
};

std::vector<Stencil> stencils(int M) {
  std::vector<std::vector<int>> offs;
  if (M < 3) {
    // short window: every interval interpolates through all M + 1 nodes
    for (int iv = 0; iv < M; ++iv) {
      std::vector<int> o;
      for (int i = 0; i <= M; ++i) o.push_back(i - iv);
      offs.push_back(o);
    }
  } else {
    offs = {{0, 1, 2, 3}, {-1, 0, 1, 2}, {-2, -1, 0, 1}};
  }
  std::vector<Stencil> out;
  for (auto& o : offs) {
    std::vector<double> nodes(o.begin(), o.end());
    out.push_back({o, lagrange_coeffs(nodes)});
  }
  return out;
}

int stencil_for(int interval, int M) {
  if (M < 3) return interval;
  if (interval == 0) return 0;
  if (interval == M - 1) return 2;
  return 1;
}

}  // namespace

std::vector<FieldPair> duhamel_sum(const Grid& g, const std::vector<FieldPair>& gv, double h) {
  const int M = static_cast<int>(gv.size()) - 1;
  std::vector<FieldPair> out;
  out.reserve(M + 1);
  out.push_back({VectorField(g), VectorField(g)});
  if (M < 1) return out;
  const int n = g.n();
  const double u2 = g.wavenumber_unit() * g.wavenumber_unit();
  const auto st = stencils(M);
  const int half = n / 2;
  const int m2max = 3 * half * half;
  // weights[s][m2][j] = int_0^1 e^{-z(1-s)} L_j(s) ds, z = |m|^2 unit^2 h
  std::vector<std::vector<std::array<double, 4>>> weights(st.size());
  std::vector<double> decay(m2max + 1);
  for (int m2 = 0; m2 <= m2max; ++m2) {
    const double z = static_cast<double>(m2) * u2 * h;
    decay[m2] = std::exp(-z);
    const auto mom = exp_moments(z);
    for (std::size_t s = 0; s < st.size(); ++s) {
      std::array<double, 4> w{};
      for (std::size_t j = 0; j < st[s].offsets.size(); ++j) {
        double acc = 0.0;
        for (int p = 0; p < 4; ++p) acc += st[s].coeffs[j][p] * mom[p];
        w[j] = acc;
      }
      weights[s].push_back(w);
    }
  }
  std::vector<int> m2of(g.size());
  {
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i, ++idx) {
          const int a = g.mode(i), b = g.mode(j), c = g.mode(k);
          m2of[idx] = a * a + b * b + c * c;
        }
  }
  std::vector<std::array<std::vector<cplx>, 6>> acc(M + 1);
  for (int comp = 0; comp < 6; ++comp) {
    std::vector<const std::vector<cplx>*> src(M + 1, nullptr);
    for (int m = 0; m <= M; ++m) {
      const VectorField& f = comp < 3 ? gv[m].first : gv[m].second;
      if (!f[comp % 3].is_zero()) src[m] = &f[comp % 3].spectral();
    }
    std::vector<cplx> I(g.size(), cplx(0.0, 0.0));
    for (int iv = 0; iv < M; ++iv) {
      const int s = stencil_for(iv, M);
      const auto& offs = st[s].offsets;
      for (std::size_t idx = 0; idx < I.size(); ++idx) {
        const int m2 = m2of[idx];
        cplx v = decay[m2] * I[idx];
        const auto& w = weights[s][m2];
        cplx q(0.0, 0.0);
        for (std::size_t j = 0; j < offs.size(); ++j) {
          const auto* p = src[iv + offs[j]];
          if (p) q += w[j] * (*p)[idx];
        }
        I[idx] = v + h * q;
      }
      acc[iv + 1][comp] = I;
    }
  }
  for (int m = 1; m <= M; ++m) {
    auto make = [&](int base) {
      return VectorField(ScalarField::from_spectral(g, std::move(acc[m][base])),
                         ScalarField::from_spectral(g, std::move(acc[m][base + 1])),
                         ScalarField::from_spectral(g, std::move(acc[m][base + 2])));
    };
    VectorField a = make(0);
    VectorField b = make(3);
    out.push_back({std::move(a), std::move(b)});
  }
  return out;
}

namespace {

std::vector<FieldPair> linear_nodes(const MhdSystem& sys, const FieldPair& u0, double t_a,
                                    double h, int M) {
  const Grid& g = sys.grid();
  std::vector<FieldPair> a;
  a.reserve(M + 1);
  a.push_back(u0);
  for (int m = 1; m <= M; ++m)
    a.push_back({sys.heat(u0.first, m * h), sys.heat(u0.second, m * h)});
  const auto& cfg = sys.config();
  if (cfg.F.is_zero() && cfg.G.is_zero()) return a;
  std::vector<FieldPair> f;
  for (int m = 0; m <= M; ++m) {
    const double t = t_a + m * h;
    const TensorField& F = sys.forcing_F(t);
    VectorField fu = F.is_zero() ? VectorField(g) : leray_project(divergence(F));
    const TensorField& G = sys.forcing_G(t);
    VectorField fb = G.is_zero() ? VectorField(g) : leray_project(divergence(G));
    f.push_back({std::move(fu), std::move(fb)});
  }
  const auto d = duhamel_sum(g, f, h);
  for (int m = 1; m <= M; ++m) {
    a[m].first = a[m].first + d[m].first;
    a[m].second = a[m].second + d[m].second;
  }
  return a;
}

}  // namespace

WindowResult picard_window(const MhdSystem& sys, const FieldPair& u0, double t_a, double h,
                           int M, const NodeOp& bil, PicardStart how, double tol,
                           int max_iters) {
  const Grid& g = sys.grid();
  const std::vector<FieldPair> a = linear_nodes(sys, u0, t_a, h, M);
  std::vector<FieldPair> U;
  if (how == PicardStart::zero) {
    U.assign(M + 1, {VectorField(g), VectorField(g)});
  } else if (how == PicardStart::linear) {
    U = a;
  } else {
    for (const auto& x : a) U.push_back({1.5 * x.first, 1.5 * x.second});
  }
  U[0] = u0;
  WindowResult res;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<FieldPair> gv;
    gv.reserve(M + 1);
    for (int m = 0; m <= M; ++m) gv.push_back(bil(m, U[m]));
    const auto d = duhamel_sum(g, gv, h);
    std::vector<FieldPair> next;
    next.reserve(M + 1);
    next.push_back(u0);
    double dist = 0.0, scale = 0.0;
    for (int m = 1; m <= M; ++m) {
      next.push_back({a[m].first + d[m].first, a[m].second + d[m].second});
      dist = std::max(dist, pair_distance(next[m], U[m]));
      scale = std::max(scale, pair_norm(next[m]));
    }
    res.distances.push_back(dist);
    U = std::move(next);
    if (!std::isfinite(dist) || (res.distances.size() > 2 && dist > 1e6 * res.distances[0] &&
                                 dist > tol * scale))
      throw PicardDivergence("Picard iteration diverged", res.distances);
    if (dist <= tol * scale) {
      res.nodes = std::move(U);
      return res;
    }
  }
  throw PicardDivergence("Picard iteration did not converge within " +
                             std::to_string(max_iters) + " iterations",
                         res.distances);
}

}  // namespace detail

namespace {

PicardResult finish_result(const SimConfig& cfg, const MhdSystem& sys, double t_a,
                           detail::WindowResult&& w) {
  PicardResult r;
  r.distances = std::move(w.distances);
  r.iterations = static_cast<int>(r.distances.size());
  for (std::size_t k = 1; k < r.distances.size(); ++k)
    r.ratios.push_back(r.distances[k - 1] > 0.0 ? r.distances[k] / r.distances[k - 1] : 0.0);
  r.contraction = 0.0;
  for (double x : r.ratios) r.contraction = std::max(r.contraction, x);
  r.geometric = true;
  for (double x : r.ratios)
    if (!r.ratios.empty() && x > r.ratios.front()) r.geometric = false;
  r.trajectory.gammas = cfg.ledger_gammas;
  r.trajectory.local_tests = cfg.local_tests;
  for (std::size_t m = 0; m < w.nodes.size(); ++m) {
    SimState s = sys.complete(t_a + m * cfg.dt, w.nodes[m].first, w.nodes[m].second);
    r.trajectory.rows.push_back(diagnostics_row(s, cfg.ledger_gammas, cfg.local_tests));
    s.compact();
    r.trajectory.states.push_back(std::move(s));
  }
  return r;
}

}  // namespace

PicardResult picard_solve(const SimConfig& cfg, const SimState& start, double t_b,
                          PicardStart how) {
  const long steps = detail::checked_steps(t_b - start.t, cfg.dt);
  const MhdSystem sys(cfg);
  const double T0 = existence_time(start.u, start.b, forcing_l2l2_norm(cfg, t_b),
                                   cfg.epsilon, cfg.picard.existence_c, t_b - start.t);
  if (t_b - start.t > T0 * (1.0 + 1e-12))
    std::cerr << "warning: Picard window " << (t_b - start.t)
              << " exceeds the existence time " << T0 << "\n";
  const double t_a = start.t;
  const detail::NodeOp bil = [&](int m, const FieldPair& U) {
    const double t = t_a + m * cfg.dt;
    auto [v, c] = sys.drifts(t, U.first, U.second);
    return sys.rhs_with_drifts(t, U.first, U.second, v, c, false);
  };
  auto w = detail::picard_window(sys, {start.u, start.b}, t_a, cfg.dt,
                                 static_cast<int>(steps), bil, how, cfg.picard.tol,
                                 cfg.picard.max_iters);
  return finish_result(cfg, sys, t_a, std::move(w));
}

PicardResult picard_solve(const SimConfig& cfg, double t_a, double t_b, PicardStart how) {
  SimState s;
  auto [u, b] = make_initial(cfg.initial, cfg.grid, cfg.seed);
  s.u = std::move(u);
  s.b = std::move(b);
  if (t_a > 0.0) {
    SimConfig c = cfg;
    c.t_end = t_a;
    c.ledger_gammas.clear();
    c.local_tests.clear();
    c.keep_derived = false;
    c.snapshot_every = static_cast<int>(detail::checked_steps(t_a, cfg.dt));
    c.ledger_every = c.snapshot_every;
    Trajectory tr = solve_mhdg(c, s);
    s = tr.states.back();
  }
  return picard_solve(cfg, s, t_b, how);
}

FieldPair duhamel_linear_part(const VectorField& u0, const VectorField& b0,
                              const ForcingSpec& F, const ForcingSpec& G, double t,
                              int steps) {
  if (t < 0.0) throw DomainError("duhamel_linear_part: negative time");
  SimConfig cfg;
  cfg.grid = u0.grid();
  cfg.F = F;
  cfg.G = G;
  cfg.epsilon = 0.0;
  cfg.variant = MollifierVariant::time_scaled;
  if (t == 0.0) return {u0, b0};
  const MhdSystem sys(cfg);
  const auto a = detail::linear_nodes(sys, {u0, b0}, 0.0, t / steps, steps);
  return a.back();
}

double calibrate_existence_constant(const std::vector<SimConfig>& battery, double target) {
  if (battery.empty()) throw DomainError("calibration battery is empty");
  double best = std::numeric_limits<double>::infinity();
  for (const SimConfig& base : battery) {
    auto [u0, b0] = make_initial(base.initial, base.grid, base.seed);
    const double fn = forcing_l2l2_norm(base, base.t_end);
    const int M = std::max(1, base.picard.window_steps);
    auto contraction = [&](double c) {
      const double T = existence_time(u0, b0, fn, base.epsilon, c, base.t_end);
      SimConfig cfg = base;
      cfg.dt = T / M;
      cfg.picard.existence_c = c;
      cfg.picard.max_iters = 3;  // only the first ratio is needed
      cfg.ledger_gammas.clear();
      cfg.local_tests.clear();
      SimState s;
      s.u = u0;
      s.b = b0;
      try {
        std::cerr.setstate(std::ios::failbit);
        auto r = picard_solve(cfg, s, T, PicardStart::linear);
        std::cerr.clear();
        return r.ratios.empty() ? 0.0 : r.ratios.front();
      } catch (const PicardDivergence& e) {
        std::cerr.clear();
        const auto& h = e.history();
        if (h.size() < 2 || !std::isfinite(h[1]) || !(h[0] > 0.0))
          return std::numeric_limits<double>::infinity();
        return h[1] / h[0];
      }
    };
    double lo = 1e-6, hi = 1e6;
    if (contraction(hi) <= target) {
      best = std::min(best, hi);
      continue;
    }
    if (contraction(lo) > target) {
      best = std::min(best, lo);
      continue;
    }
    for (int it = 0; it < 30; ++it) {
      const double mid = std::sqrt(lo * hi);
      if (contraction(mid) <= target)
        lo = mid;
      else
        hi = mid;
      if (hi / lo < 1.01) break;
    }
    best = std::min(best, lo);
  }
  return best;
}

}  // namespace mhdlab
