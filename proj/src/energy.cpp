#include "mhdlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "mhdlab/errors.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/summation.hpp"

namespace mhdlab {

namespace {

TensorField flux_tensor(const VectorField& a, const VectorField& bb, const VectorField& v,
                        const VectorField& c, const TensorField& F) {
  const Grid& g = a.grid();
  TensorField T(g);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ScalarField e = product(v[i], a[j]) - product(c[i], bb[j]);
      if (!F.is_zero()) e = e - F.at(i, j);
      T.at(i, j) = e;
    }
  return T;
}

}  // namespace

std::pair<ScalarField, ScalarField> compute_p_q(const VectorField& u, const VectorField& b,
                                                const VectorField& v, const VectorField& c,
                                                const TensorField& F, const TensorField& G) {
  return {riesz_riesz_contract(flux_tensor(u, b, v, c, F)),
          riesz_riesz_contract(flux_tensor(b, u, v, c, G))};
}

std::pair<VectorField, VectorField> assembled_rhs(const SimState& s) {
  const TensorField Tu = flux_tensor(s.u, s.b, s.v, s.c, s.F);
  const TensorField Tb = flux_tensor(s.b, s.u, s.v, s.c, s.G);
  VectorField ru = laplacian(s.u) - divergence(Tu) - gradient(s.p);
  VectorField rb = laplacian(s.b) - divergence(Tb) - gradient(s.q);
  return {ru, rb};
}

double EnergyLedger::term(const std::string& name) const {
  for (std::size_t i = 0; i < kLedgerTerms.size(); ++i)
    if (name == kLedgerTerms[i]) return terms[i];
  throw DomainError("unknown ledger term: " + name);
}

double EnergyLedger::lhs() const { return terms[1] + terms[2]; }

double EnergyLedger::rhs() const {
  double s = terms[0];
  for (std::size_t i = 3; i < terms.size(); ++i) s += terms[i];
  return s;
}

namespace {

const std::vector<double>* phys_or_null(const ScalarField& f) {
  return f.is_zero() ? nullptr : &f.physical();
}

double at(const std::vector<double>* p, std::size_t i) { return p ? (*p)[i] : 0.0; }

// Physical samples of a state and of the derivatives shared by every
// diagnostic evaluated on it.
struct PointData {
  const Grid* g;
  std::size_t size;
  const std::vector<double>* u[3];
  const std::vector<double>* b[3];
  const std::vector<double>* v[3];
  const std::vector<double>* c[3];
  const std::vector<double>* p;
  const std::vector<double>* q;
  const std::vector<double>* F[9];
  const std::vector<double>* G[9];
  ScalarField du_store[9], db_store[9];
  VectorField divF, divG;
  const std::vector<double>* du[9];  // d_i u_j at 3 i + j
  const std::vector<double>* db[9];
  const std::vector<double>* dF[3];
  const std::vector<double>* dG[3];

  explicit PointData(const SimState& s) {
    g = &s.u.grid();
    size = g->size();
    for (int a = 0; a < 3; ++a) {
      u[a] = phys_or_null(s.u[a]);
      b[a] = phys_or_null(s.b[a]);
      v[a] = phys_or_null(s.v[a]);
      c[a] = phys_or_null(s.c[a]);
    }
    p = phys_or_null(s.p);
    q = phys_or_null(s.q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        F[3 * i + j] = s.F.is_zero() ? nullptr : phys_or_null(s.F.at(i, j));
        G[3 * i + j] = s.G.is_zero() ? nullptr : phys_or_null(s.G.at(i, j));
        du_store[3 * i + j] = partial(s.u[j], i);
        db_store[3 * i + j] = partial(s.b[j], i);
      }
    for (int k = 0; k < 9; ++k) {
      du[k] = phys_or_null(du_store[k]);
      db[k] = phys_or_null(db_store[k]);
    }
    divF = s.F.is_zero() ? VectorField(*g) : divergence(s.F);
    divG = s.G.is_zero() ? VectorField(*g) : divergence(s.G);
    for (int a = 0; a < 3; ++a) {
      dF[a] = phys_or_null(divF[a]);
      dG[a] = phys_or_null(divG[a]);
    }
  }
};

struct WeightData {
  std::vector<double> w;
  std::array<std::vector<double>, 3> gw;
  bool flat = false;
};

WeightData weight_data(const Weight& wt, const Grid& g) {
  WeightData d;
  if (wt.gamma == 0.0) {
    d.flat = true;
    return d;
  }
  d.w = weight_field(wt, g).physical();
  const VectorField gw = weight_gradient_field(wt, g);
  for (int a = 0; a < 3; ++a) d.gw[a] = gw[a].physical();
  return d;
}

LedgerRates rates_for(const PointData& P, const WeightData& W) {
  const double h3 = P.g->cell_volume();
  auto sum = [&](auto f) { return h3 * pairwise_sum(P.size, f); };
  auto w = [&](std::size_t x) { return W.flat ? 1.0 : W.w[x]; };
  auto gw = [&](int a, std::size_t x) { return W.flat ? 0.0 : W.gw[a][x]; };
  auto sq = [&](const std::vector<double>* const* f, std::size_t x) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += at(f[a], x) * at(f[a], x);
    return s;
  };
  LedgerRates r;
  r.energy = sum([&](std::size_t x) { return (sq(P.u, x) + sq(P.b, x)) * w(x); });
  r.dissipation = sum([&](std::size_t x) {
    double s = 0.0;
    for (int k = 0; k < 9; ++k) s += at(P.du[k], x) * at(P.du[k], x) + at(P.db[k], x) * at(P.db[k], x);
    return 2.0 * s * w(x);
  });
  if (!W.flat) {
    r.weight_gradient = sum([&](std::size_t x) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        double gi = 0.0;
        for (int j = 0; j < 3; ++j)
          gi += at(P.u[j], x) * at(P.du[3 * i + j], x) + at(P.b[j], x) * at(P.db[3 * i + j], x);
        s += gi * gw(i, x);
      }
      return -2.0 * s;
    });
    r.transport_v = sum([&](std::size_t x) {
      double vg = 0.0;
      for (int a = 0; a < 3; ++a) vg += at(P.v[a], x) * gw(a, x);
      return (sq(P.u, x) + sq(P.b, x)) * vg;
    });
    r.transport_c = sum([&](std::size_t x) {
      double ub = 0.0, cg = 0.0;
      for (int a = 0; a < 3; ++a) {
        ub += at(P.u[a], x) * at(P.b[a], x);
        cg += at(P.c[a], x) * gw(a, x);
      }
      return -2.0 * ub * cg;
    });
    r.pressure_u = sum([&](std::size_t x) {
      double ug = 0.0;
      for (int a = 0; a < 3; ++a) ug += at(P.u[a], x) * gw(a, x);
      return 2.0 * at(P.p, x) * ug;
    });
    r.q_b = sum([&](std::size_t x) {
      double bg = 0.0;
      for (int a = 0; a < 3; ++a) bg += at(P.b[a], x) * gw(a, x);
      return 2.0 * at(P.q, x) * bg;
    });
  }
  auto grad_term = [&](const std::vector<double>* const* T, const std::vector<double>* const* d) {
    return sum([&](std::size_t x) {
      double s = 0.0;
      for (int k = 0; k < 9; ++k) s += at(T[k], x) * at(d[k], x);
      return -2.0 * s * w(x);
    });
  };
  auto weight_term = [&](const std::vector<double>* const* T, const std::vector<double>* const* f) {
    if (W.flat) return 0.0;
    return sum([&](std::size_t x) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += at(T[3 * i + j], x) * at(f[j], x) * gw(i, x);
      return -2.0 * s;
    });
  };
  bool hasF = false, hasG = false;
  for (int k = 0; k < 9; ++k) {
    hasF = hasF || P.F[k];
    hasG = hasG || P.G[k];
  }
  if (hasF) {
    r.forcing_F_grad = grad_term(P.F, P.du);
    r.forcing_F_weight = weight_term(P.F, P.u);
  }
  if (hasG) {
    r.forcing_G_grad = grad_term(P.G, P.db);
    r.forcing_G_weight = weight_term(P.G, P.b);
  }
  return r;
}

struct Bump {
  double rho;
  Point center;
  // beta, grad beta, Lap beta at x
  void eval(const Point& x, double& beta, Point& grad, double& lap) const {
    const double d[3] = {x[0] - center[0], x[1] - center[1], x[2] - center[2]};
    const double s = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    const double r2 = rho * rho;
    if (s >= r2) {
      beta = 0.0;
      grad = {0.0, 0.0, 0.0};
      lap = 0.0;
      return;
    }
    const double den = r2 - s;
    beta = std::exp(1.0 - r2 / den);
    const double gs = -beta * r2 / (den * den);
    const double gps = gs * (-r2 / (den * den)) + beta * (-2.0 * r2 / (den * den * den));
    for (int a = 0; a < 3; ++a) grad[a] = 2.0 * d[a] * gs;
    lap = 6.0 * gs + 4.0 * s * gps;
  }
};

Bump bump_for(const LocalTestSpec& t, const Grid& g) {
  if (!(t.radius > 0.0) || t.radius > 0.5)
    throw DomainError("local test radius must lie in (0, 0.5] (fraction of L)");
  const double c = 0.5 * g.length();
  return {t.radius * g.length(), {c, c, c}};
}

// Spatial factor of a local test: the bump projected onto the dealiased
// modes, with spectral derivatives. Pairings of band-limited fields against it
// are then integrated exactly by the grid sum.
struct BumpFields {
  std::vector<double> beta, lap;
  std::array<std::vector<double>, 3> grad;
};

BumpFields bump_fields(const LocalTestSpec& test, const Grid& g) {
  const Bump bump = bump_for(test, g);
  const ScalarField raw = ScalarField::sample(g, [&](double x, double y, double z) {
    double b, l;
    Point gr;
    bump.eval({x, y, z}, b, gr, l);
    return b;
  });
  const ScalarField beta = dealias(raw);
  BumpFields out;
  out.beta = beta.physical();
  out.lap = laplacian(beta).physical();
  for (int a = 0; a < 3; ++a) out.grad[a] = partial(beta, a).physical();
  return out;
}

LocalRates local_for(const PointData& P, const LocalTestSpec& test) {
  const Grid& g = *P.g;
  const BumpFields B = bump_fields(test, g);
  const auto& beta = B.beta;
  const auto& lap = B.lap;
  const auto& grad = B.grad;
  const double h3 = g.cell_volume();
  LocalRates r;
  r.s1 = h3 * pairwise_sum(P.size, [&](std::size_t x) {
    double e = 0.0;
    for (int a = 0; a < 3; ++a) e += at(P.u[a], x) * at(P.u[a], x) + at(P.b[a], x) * at(P.b[a], x);
    return 0.5 * e * beta[x];
  });
  r.s2 = h3 * pairwise_sum(P.size, [&](std::size_t x) {
    double e = 0.0, ub = 0.0, D = 0.0, f = 0.0, flux = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double ua = at(P.u[a], x), ba = at(P.b[a], x);
      e += ua * ua + ba * ba;
      ub += ua * ba;
      f += ua * at(P.dF[a], x) + ba * at(P.dG[a], x);
    }
    e *= 0.5;
    for (int k = 0; k < 9; ++k) D += at(P.du[k], x) * at(P.du[k], x) + at(P.db[k], x) * at(P.db[k], x);
    for (int a = 0; a < 3; ++a) {
      const double J = e * at(P.v[a], x) + at(P.p, x) * at(P.u[a], x) +
                       at(P.q, x) * at(P.b[a], x) - ub * at(P.c[a], x);
      flux += J * grad[a][x];
    }
    return e * lap[x] - D * beta[x] + flux + f * beta[x];
  });
  return r;
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 2.0))
    throw DomainError("weighted ledger requires 0 <= gamma <= 2");
}

}  // namespace

LedgerRates ledger_rates(const SimState& s, const Weight& w) {
  const PointData P(s);
  return rates_for(P, weight_data(w, s.u.grid()));
}

LocalRates local_rates(const SimState& s, const LocalTestSpec& test) {
  const PointData P(s);
  return local_for(P, test);
}

DiagnosticRow diagnostics_row(const SimState& s, const std::vector<double>& gammas,
                              const std::vector<LocalTestSpec>& tests) {
  const PointData P(s);
  const Grid& g = s.u.grid();
  DiagnosticRow row;
  row.t = s.t;
  row.ledgers.emplace_back(0.0, rates_for(P, weight_data(make_weight(0.0, g), g)));
  for (double gm : gammas) {
    if (gm == 0.0) continue;
    check_gamma(gm);
    row.ledgers.emplace_back(gm, rates_for(P, weight_data(make_weight(gm, g), g)));
  }
  for (const auto& t : tests) row.local.push_back(local_for(P, t));
  return row;
}

namespace {

struct RateSeries {
  std::vector<double> t;
  std::vector<LedgerRates> r;
};

// Every recorded sample of the rates for gamma, from the rows when gamma was
// tracked and from the stored states otherwise.
RateSeries rate_series(const Trajectory& traj, double gamma) {
  RateSeries out;
  bool tracked = !traj.rows.empty();
  if (tracked) {
    const auto& l = traj.rows.front().ledgers;
    tracked = std::any_of(l.begin(), l.end(), [&](const auto& e) { return e.first == gamma; });
  }
  if (tracked) {
    for (const auto& row : traj.rows)
      for (const auto& e : row.ledgers)
        if (e.first == gamma) {
          out.t.push_back(row.t);
          out.r.push_back(e.second);
        }
  } else {
    for (const auto& s : traj.states) {
      out.t.push_back(s.t);
      out.r.push_back(ledger_rates(s, make_weight(gamma, s.u.grid())));
    }
  }
  return out;
}

std::size_t find_time(const RateSeries& s, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (std::abs(s.t[i] - t) <= tol) return i;
  throw DomainError("ledger window endpoint is not a recorded sample time");
}

// Ledgers on [t_first, t_k] for k in (first, last], from interval integrals
// whose cubic stencils may use samples outside the window.
std::vector<EnergyLedger> ledgers_from(const RateSeries& s, std::size_t first,
                                       std::size_t last) {
  static const std::array<double LedgerRates::*, 10> members = {
      &LedgerRates::dissipation,    &LedgerRates::weight_gradient,
      &LedgerRates::transport_v,    &LedgerRates::transport_c,
      &LedgerRates::pressure_u,     &LedgerRates::q_b,
      &LedgerRates::forcing_F_grad, &LedgerRates::forcing_F_weight,
      &LedgerRates::forcing_G_grad, &LedgerRates::forcing_G_weight};
  std::array<std::vector<double>, 10> parts;
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::vector<double> y;
    for (const auto& r : s.r) y.push_back(r.*members[m]);
    parts[m] = interval_integrals(s.t, y);
  }
  std::vector<EnergyLedger> out;
  std::array<double, 10> acc{};
  for (std::size_t k = first; k < last; ++k) {
    for (std::size_t m = 0; m < members.size(); ++m) acc[m] += parts[m][k];
    EnergyLedger L;
    L.t_a = s.t[first];
    L.t_b = s.t[k + 1];
    L.terms[0] = s.r[first].energy;
    L.terms[1] = s.r[k + 1].energy;
    for (std::size_t m = 0; m < members.size(); ++m) L.terms[2 + m] = acc[m];
    L.slack = L.rhs() - L.lhs();
    out.push_back(L);
  }
  return out;
}

}  // namespace

EnergyLedger weighted_energy_ledger(const Trajectory& traj, double gamma, double t_a,
                                    double t_b) {
  check_gamma(gamma);
  if (!(t_b > t_a)) throw DomainError("ledger window must have t_b > t_a");
  const RateSeries s = rate_series(traj, gamma);
  const std::size_t i = find_time(s, t_a), j = find_time(s, t_b);
  return ledgers_from(s, i, j).back();
}

EnergyLedger global_energy_ledger(const Trajectory& traj, double t_a, double t_b) {
  return weighted_energy_ledger(traj, 0.0, t_a, t_b);
}

std::vector<EnergyLedger> cumulative_ledgers(const Trajectory& traj, double gamma) {
  check_gamma(gamma);
  const RateSeries s = rate_series(traj, gamma);
  if (s.t.size() < 2) return {};
  return ledgers_from(s, 0, s.t.size() - 1);
}

double local_time_profile(const LocalTestSpec& test, double t) {
  auto a = [](double s) { return smooth_step(2.0 * s - 1.0); };
  return a((t - test.t0) / test.eta) - a((t - test.t1) / test.eta);
}

double local_time_profile_derivative(const LocalTestSpec& test, double t) {
  auto da = [](double s) { return 2.0 * smooth_step_derivative(2.0 * s - 1.0); };
  return (da((t - test.t0) / test.eta) - da((t - test.t1) / test.eta)) / test.eta;
}

namespace {

void check_test(const LocalTestSpec& test) {
  if (!(test.eta > 0.0) || !(test.t1 > test.t0))
    throw DomainError("local test requires eta > 0 and t1 > t0");
}

std::vector<LocalRates> local_series(const Trajectory& traj, const LocalTestSpec& test,
                                     std::vector<double>& times) {
  std::vector<LocalRates> out;
  std::size_t which = traj.local_tests.size();
  for (std::size_t i = 0; i < traj.local_tests.size(); ++i) {
    const auto& q = traj.local_tests[i];
    if (q.t0 == test.t0 && q.t1 == test.t1 && q.eta == test.eta && q.radius == test.radius)
      which = i;
  }
  if (which < traj.local_tests.size() && !traj.rows.empty()) {
    for (const auto& row : traj.rows) {
      times.push_back(row.t);
      out.push_back(row.local.at(which));
    }
  } else {
    for (const auto& s : traj.states) {
      times.push_back(s.t);
      out.push_back(local_rates(s, test));
    }
  }
  if (times.size() < 2) throw DomainError("local test needs at least two samples");
  // the time profile must vanish at both ends of the recorded interval
  if (times.front() > test.t0 + 1e-12 || times.back() < test.t1 + test.eta - 1e-12)
    throw DomainError("trajectory does not cover the support of the local test");
  return out;
}

}  // namespace

double local_energy_residual(const Trajectory& traj, const LocalTestSpec& test) {
  check_test(test);
  std::vector<double> t;
  const auto r = local_series(traj, test, t);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    y[i] = local_time_profile_derivative(test, t[i]) * r[i].s1 +
           local_time_profile(test, t[i]) * r[i].s2;
  return detail::integrate_samples(t, y);
}

double local_test_norm(const Trajectory& traj, const LocalTestSpec& test) {
  check_test(test);
  const SimState* s = traj.states.empty() ? nullptr : &traj.states.front();
  if (!s) throw DomainError("local test norm needs a state for the grid");
  const Grid& g = s->u.grid();
  const BumpFields B = bump_fields(test, g);
  std::vector<double> b2(g.size());
  for (std::size_t x = 0; x < b2.size(); ++x) b2[x] = B.beta[x] * B.beta[x];
  double sb = 0.0;
  sb = g.cell_volume() * pairwise_sum(b2);
  std::vector<double> t;
  for (const auto& row : traj.rows) t.push_back(row.t);
  if (t.size() < 2) {
    t.clear();
    for (const auto& st : traj.states) t.push_back(st.t);
  }
  std::vector<double> y;
  for (double x : t) {
    const double a = local_time_profile(test, x);
    y.push_back(a * a);
  }
  return std::sqrt(detail::integrate_samples(t, y) * sb);
}

GronwallCertificate gronwall_bound(double A, double B, double T, double T0) {
  if (A < 0.0 || B < 0.0 || !(T > 0.0) || !(T0 > 0.0))
    throw DomainError("gronwall_bound: A, B >= 0 and T, T0 > 0 required");
  GronwallCertificate c{A, B, T, T0, 0.0, 0.0};
  const double ab = A + B * T0;
  double cap = std::numeric_limits<double>::infinity();
  if (B > 0.0 && ab > 0.0) cap = 1.0 / (4.0 * B * ab * ab);
  c.T1 = std::min({T, T0, cap});
  c.bound = std::sqrt(2.0) * ab;
  return c;
}

std::vector<double> gronwall_ode(double A, double B, double margin,
                                 const std::vector<double>& times, int substeps) {
  std::vector<double> out;
  double y = margin * A, t = 0.0;
  auto f = [&](double x) { return margin * B * (1.0 + x * x * x); };
  for (double target : times) {
    if (target < t) throw DomainError("gronwall_ode: times must be increasing from 0");
    const double h = (target - t) / substeps;
    for (int i = 0; i < substeps && h > 0.0 && std::isfinite(y); ++i) {
      const double k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2),
                   k4 = f(y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!std::isfinite(y)) y = std::numeric_limits<double>::infinity();
    t = target;
    out.push_back(y);
  }
  return out;
}

double passive_control_bound(double u0_norm, double b0_norm, double F_norm_sq_int,
                             double G_norm_sq_int, double vc_L3_cubed_int, double T,
                             double C_gamma) {
  if (T < 0.0 || C_gamma < 0.0 || vc_L3_cubed_int < 0.0)
    throw DomainError("passive_control_bound: negative argument");
  const double base = u0_norm * u0_norm + b0_norm * b0_norm +
                      C_gamma * (F_norm_sq_int + G_norm_sq_int);
  return base * std::exp(C_gamma * (T + std::cbrt(T) * std::pow(vc_L3_cubed_int, 2.0 / 3.0)));
}

double active_control_bound(double u0_norm, double b0_norm, double F_G_norm_sq_int,
                            double T0, double C_gamma) {
  const double X = 1.0 + u0_norm * u0_norm + b0_norm * b0_norm + F_G_norm_sq_int;
  if (C_gamma * X * X * T0 > 1.0)
    throw ConditionNotMet("active control requires C (1 + ||(u0, b0)||^2 + FG)^2 T0 <= 1");
  return C_gamma * X;
}

double pressure_membership_norm(const ScalarField& p, double gamma) {
  return weighted_lp_norm(p, 1.2, make_weight(1.2 * gamma, p.grid()));
}

}  // namespace mhdlab
