#include "mhdlab/dss.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "mhdlab/errors.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/weights.hpp"

namespace mhdlab {

double DssGenerator::divergence(const Point& x) const {
  double div = 0.0;
  for (int a = 0; a < 3; ++a) {
    const Dual X(x[0], a == 0 ? 1.0 : 0.0), Y(x[1], a == 1 ? 1.0 : 0.0),
        Z(x[2], a == 2 ? 1.0 : 0.0);
    div += value(X, Y, Z)[a].d;
  }
  return div;
}

std::array<double, 9> DssGenerator::g_F(const Point& x) const {
  std::array<double, 9> out{};
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  double chi, dchi;
  bump(r, chi, dchi);
  if (chi == 0.0) return out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[3 * i + j] = forcing_amplitude * chi * (x[i] * x[j] / (r * r) + (i == j ? 0.5 : 0.0));
  return out;
}

double DssGenerator::time_profile(double s) const {
  const double pi = 3.14159265358979323846;
  return 1.0 + 0.5 * std::sin(2.0 * pi * std::log(s) / std::log(lambda * lambda));
}

int shell_index(double lambda, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("shell_index: r must be positive");
  if (!(lambda > 1.0)) throw DomainError("shell_index: lambda must exceed 1");
  if (lambda == 2.0) return std::ilogb(r);
  int n = static_cast<int>(std::floor(std::log(r) / std::log(lambda)));
  while (std::pow(lambda, n) > r) --n;
  while (std::pow(lambda, n + 1) <= r) ++n;
  return n;
}

namespace {

double lambda_pow(double lambda, int n) {
  return lambda == 2.0 ? std::ldexp(1.0, n) : std::pow(lambda, n);
}

}  // namespace

Point dss_value(const DssGenerator& gen, const Point& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (r == 0.0) throw DomainError("dss_value: undefined at the origin");
  const int n = shell_index(gen.lambda, r);
  const double s = lambda_pow(gen.lambda, -n);
  const Point g = gen.g({s * x[0], s * x[1], s * x[2]});
  return {s * g[0], s * g[1], s * g[2]};
}

std::array<double, 9> dss_forcing_value(const DssGenerator& gen, double t, const Point& x) {
  if (!gen.has_forcing) throw DomainError("generator has no forcing profile");
  if (!(t > 0.0)) throw DomainError("dss forcing requires t > 0");
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (r == 0.0) throw DomainError("dss forcing is undefined at the origin");
  const int n = shell_index(gen.lambda, r);
  const double s = lambda_pow(gen.lambda, -n);
  auto A = gen.g_F({s * x[0], s * x[1], s * x[2]});
  const double f = s * s * gen.time_profile(s * s * t);
  for (auto& e : A) e *= f;
  return A;
}

DssField DssField::from_function(double lambda, const DssSampling& s, Fn f) {
  if (s.half_points < 2) throw DomainError("dss sampling needs half_points >= 2");
  if (!(s.half_width > 0.0)) throw DomainError("dss sampling needs half_width > 0");
  DssField u;
  u.lambda_ = lambda;
  u.m_ = s.half_points;
  u.h_ = s.half_width / s.half_points;
  u.r_core_ = s.r_core < 0.0 ? 2.0 * u.h_ : s.r_core;
  u.fn_ = std::move(f);
  const int n = 2 * u.m_ + 1;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  for (auto& d : u.data_) d.assign(total, 0.0);
  u.mask_.assign(total, 0);
  for (int k = -u.m_; k <= u.m_; ++k)
    for (int j = -u.m_; j <= u.m_; ++j)
      for (int i = -u.m_; i <= u.m_; ++i) {
        const Point x{i * u.h_, j * u.h_, k * u.h_};
        if (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) < u.r_core_) continue;
        const Point v = u.fn_(x);
        const std::size_t id = u.idx(i, j, k);
        for (int a = 0; a < 3; ++a) u.data_[a][id] = v[a];
        u.mask_[id] = 1;
      }
  return u;
}

bool DssField::resolved(int i, int j, int k) const {
  if (std::abs(i) > m_ || std::abs(j) > m_ || std::abs(k) > m_) return false;
  return mask_[idx(i, j, k)] != 0;
}

Point DssField::at(int i, int j, int k) const {
  if (!resolved(i, j, k)) throw DomainError("dss lattice point is not resolved");
  const std::size_t id = idx(i, j, k);
  return {data_[0][id], data_[1][id], data_[2][id]};
}

Point DssField::eval(const Point& x, bool* interpolated) const {
  int li[3];
  bool lattice = true;
  for (int a = 0; a < 3; ++a) {
    const double s = x[a] / h_;
    const double r = std::nearbyint(s);
    if (std::abs(s - r) > 1e-12 * std::max(1.0, std::abs(s))) lattice = false;
    li[a] = static_cast<int>(r);
  }
  if (lattice && resolved(li[0], li[1], li[2])) {
    if (interpolated) *interpolated = false;
    return at(li[0], li[1], li[2]);
  }
  int base[3];
  double w[3][4];
  for (int a = 0; a < 3; ++a) {
    const double s = x[a] / h_;
    base[a] = static_cast<int>(std::floor(s)) - 1;
    const double f = s - (base[a] + 1);
    // Lagrange weights on nodes -1, 0, 1, 2
    w[a][0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
    w[a][1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    w[a][2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
    w[a][3] = (f + 1.0) * f * (f - 1.0) / 6.0;
  }
  Point out{0.0, 0.0, 0.0};
  for (int c = 0; c < 4; ++c)
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) {
        const int i = base[0] + a, j = base[1] + b, k = base[2] + c;
        if (!resolved(i, j, k))
          throw DomainError("interpolation stencil leaves the resolved lattice");
        const double wt = w[0][a] * w[1][b] * w[2][c];
        const std::size_t id = idx(i, j, k);
        for (int d = 0; d < 3; ++d) out[d] += wt * data_[d][id];
      }
  if (interpolated) *interpolated = true;
  return out;
}

double DssField::scale() const {
  double s = 0.0;
  for (std::size_t id = 0; id < mask_.size(); ++id) {
    if (!mask_[id]) continue;
    const double v = std::sqrt(data_[0][id] * data_[0][id] + data_[1][id] * data_[1][id] +
                               data_[2][id] * data_[2][id]);
    s = std::max(s, v);
  }
  return s;
}

DssField dss_extend(const DssGenerator& gen, const DssSampling& s) {
  return DssField::from_function(gen.lambda, s,
                                 [gen](const Point& x) { return dss_value(gen, x); });
}

std::vector<Point> dyadic_sample_points(const DssField& u) {
  std::vector<Point> out;
  const int m = u.half_points();
  const double h = u.spacing();
  const double lam = u.lambda();
  const bool integer = lam == std::floor(lam);
  for (int k = -m; k <= m; ++k)
    for (int j = -m; j <= m; ++j)
      for (int i = -m; i <= m; ++i) {
        if (!u.resolved(i, j, k)) continue;
        const Point x{i * h, j * h, k * h};
        if (integer) {
          const int L = static_cast<int>(lam);
          if (u.resolved(L * i, L * j, L * k)) out.push_back(x);
          continue;
        }
        try {
          u.eval({lam * x[0], lam * x[1], lam * x[2]});
          out.push_back(x);
        } catch (const DomainError&) {
        }
      }
  return out;
}

double dss_residual(const DssField& u, const std::vector<Point>& samples, bool* interpolated) {
  const double lam = u.lambda();
  double worst = 0.0;
  bool any = false;
  for (const Point& x : samples) {
    bool i1 = false, i2 = false;
    const Point a = u.eval({lam * x[0], lam * x[1], lam * x[2]}, &i1);
    const Point b = u.eval(x, &i2);
    any = any || i1 || i2;
    double d = 0.0;
    for (int c = 0; c < 3; ++c) d += (lam * a[c] - b[c]) * (lam * a[c] - b[c]);
    worst = std::max(worst, std::sqrt(d));
  }
  if (interpolated) *interpolated = any;
  return worst;
}

double shell_integral(const DssField::Fn& f, double gamma, double r0, double r1) {
  if (!(r1 > r0) || r0 < 0.0) throw DomainError("shell_integral: need 0 <= r0 < r1");
  using boost::math::quadrature::gauss;
  const double pi = 3.14159265358979323846;
  const int nphi = 48;
  auto sphere = [&](double r) {
    auto ring = [&](double mu) {
      const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      double s = 0.0;
      for (int q = 0; q < nphi; ++q) {
        const double phi = 2.0 * pi * q / nphi;
        const Point v = f({r * st * std::cos(phi), r * st * std::sin(phi), r * mu});
        s += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      }
      return s * 2.0 * pi / nphi;
    };
    return gauss<double, 30>::integrate(ring, -1.0, 1.0) * r * r * std::pow(1.0 + r, -gamma);
  };
  return gauss<double, 30>::integrate(sphere, r0, r1);
}

std::vector<ShellStudy> dss_weighted_norm_study(const DssField& u,
                                                const std::vector<double>& gammas,
                                                const std::vector<double>& radii) {
  if (radii.empty()) throw DomainError("norm study needs at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw DomainError("radii must increase");
  const double lam = u.lambda();
  const double r0 = u.r_core();
  if (!(radii.front() > r0)) throw DomainError("radii must exceed the core radius");
  // breakpoints at the shell boundaries keep each piece smooth
  std::vector<double> cuts{r0};
  for (int n = shell_index(lam, r0) + 1; lambda_pow(lam, n) < radii.back(); ++n)
    cuts.push_back(lambda_pow(lam, n));
  for (double R : radii) cuts.push_back(R);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<ShellStudy> out;
  for (double gamma : gammas) {
    ShellStudy s;
    s.gamma = gamma;
    s.radii = radii;
    s.expected_ratio = std::pow(lam, 1.0 - gamma);
    double acc = 0.0;
    std::size_t c = 1;
    for (double R : radii) {
      for (; c < cuts.size() && cuts[c] <= R; ++c)
        acc += shell_integral(u.evaluator(), gamma, cuts[c - 1], cuts[c]);
      s.norms.push_back(std::sqrt(acc));
    }
    for (std::size_t i = 1; i < s.norms.size(); ++i)
      s.increments.push_back(s.norms[i] * s.norms[i] - s.norms[i - 1] * s.norms[i - 1]);
    for (std::size_t i = 1; i < s.increments.size(); ++i)
      s.ratios.push_back(s.increments[i] / s.increments[i - 1]);
    s.converges = !s.ratios.empty() &&
                  std::all_of(s.ratios.begin(), s.ratios.end(), [](double r) { return r < 1.0; });
    out.push_back(std::move(s));
  }
  return out;
}

TensorField dss_forcing(const DssGenerator& gen, double t, const Grid& g, double cutoff_radius) {
  const Cutoff cut = make_cutoff(cutoff_radius, g);
  const double c = 0.5 * g.length();
  const double core = 2.0 * g.spacing();
  std::array<std::vector<double>, 9> e;
  for (auto& v : e) v.assign(g.size(), 0.0);
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Point x{g.coord(i) - c, g.coord(j) - c, g.coord(k) - c};
        if (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) < core) continue;
        const double phi = cut.value({g.coord(i), g.coord(j), g.coord(k)});
        if (phi == 0.0) continue;
        const auto f = dss_forcing_value(gen, t, x);
        const std::size_t id = g.index(i, j, k);
        for (int a = 0; a < 9; ++a) e[a][id] = phi * f[a];
      }
  TensorField out(g);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      out.at(a, b) = dealias(ScalarField::from_physical(g, std::move(e[3 * a + b])));
  return out;
}

VectorField rotate_axes(const VectorField& u) {
  const Grid& g = u.grid();
  if (u.is_zero()) return VectorField(g);
  const int n = g.n();
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.resize(g.size());
  for (int a = 0; a < 3; ++a) {
    const ScalarField& src = u[(a + 2) % 3];
    if (src.is_zero()) {
      std::fill(out[a].begin(), out[a].end(), 0.0);
      continue;
    }
    const auto& s = src.physical();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out[a][g.index(i, j, k)] = s[g.index(j, k, i)];
  }
  return VectorField(ScalarField::from_physical(g, std::move(out[0])),
                     ScalarField::from_physical(g, std::move(out[1])),
                     ScalarField::from_physical(g, std::move(out[2])));
}

namespace {

double sum_sq(const VectorField& f) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (f[a].is_zero()) continue;
    for (double x : f[a].physical()) s += x * x;
  }
  return s;
}

}  // namespace

ScalingReport scaling_covariance_check(const SimConfig& cfg, double lambda, bool rotate) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  SimConfig base = cfg;
  base.ledger_gammas.clear();
  base.local_tests.clear();
  base.keep_derived = false;
  SimConfig comp = base;
  comp.grid = Grid(cfg.grid.n(), cfg.grid.length() / lambda, cfg.grid.dealias_fraction());
  comp.dt = cfg.dt / (lambda * lambda);
  comp.t_end = cfg.t_end / (lambda * lambda);
  if (cfg.variant == MollifierVariant::fixed) comp.epsilon = cfg.epsilon / lambda;
  comp.F = rotate ? cfg.F.rescaled(lambda).rotated() : cfg.F.rescaled(lambda);
  comp.G = rotate ? cfg.G.rescaled(lambda).rotated() : cfg.G.rescaled(lambda);

  auto [u0, b0] = make_initial(cfg.initial, cfg.grid, cfg.seed);
  SimState s0;
  s0.u = u0;
  s0.b = b0;
  auto on_comp_grid = [&](const VectorField& f) {
    VectorField out(comp.grid);
    for (int a = 0; a < 3; ++a) {
      if (f[a].is_zero()) continue;
      // keep whichever view the solver will read first so lambda = 2 stays bit-exact
      if (f[a].has_spectral()) {
        std::vector<cplx> c = f[a].spectral();
        for (auto& z : c) z *= lambda;
        out[a] = ScalarField::from_spectral(comp.grid, std::move(c));
      } else {
        std::vector<double> x = f[a].physical();
        for (auto& z : x) z *= lambda;
        out[a] = ScalarField::from_physical(comp.grid, std::move(x));
      }
    }
    return rotate ? rotate_axes(out) : out;
  };
  SimState c0;
  c0.u = on_comp_grid(u0);
  c0.b = on_comp_grid(b0);
  const Trajectory tb = solve_mhdg(base, s0);
  const Trajectory tc = solve_mhdg(comp, c0);
  if (tb.states.size() != tc.states.size())
    throw Error("scaling check: trajectories have different lengths");
  ScalingReport rep;
  rep.lambda = lambda;
  for (std::size_t i = 0; i < tb.states.size(); ++i) {
    const VectorField eu = on_comp_grid(tb.states[i].u);
    const VectorField eb = on_comp_grid(tb.states[i].b);
    VectorField du(comp.grid), db(comp.grid);
    for (int a = 0; a < 3; ++a) {
      std::vector<double> x(comp.grid.size(), 0.0), y(comp.grid.size(), 0.0);
      const auto& cu = tc.states[i].u[a];
      const auto& cb = tc.states[i].b[a];
      for (std::size_t p = 0; p < x.size(); ++p) {
        x[p] = (cu.is_zero() ? 0.0 : cu.physical()[p]) - (eu[a].is_zero() ? 0.0 : eu[a].physical()[p]);
        y[p] = (cb.is_zero() ? 0.0 : cb.physical()[p]) - (eb[a].is_zero() ? 0.0 : eb[a].physical()[p]);
      }
      du[a] = ScalarField::from_physical(comp.grid, std::move(x));
      db[a] = ScalarField::from_physical(comp.grid, std::move(y));
    }
    const double num = std::sqrt(sum_sq(du) + sum_sq(db));
    const double den = std::sqrt(sum_sq(eu) + sum_sq(eb));
    const double r = den > 0.0 ? num / den : num;
    rep.times.push_back(tb.states[i].t);
    rep.rel_diff.push_back(r);
    rep.max_rel_diff = std::max(rep.max_rel_diff, r);
  }
  return rep;
}

}  // namespace mhdlab
