#include "mhdlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>

#include "mhdlab/config.hpp"
#include "mhdlab/dss.hpp"
#include "mhdlab/energy.hpp"
#include "mhdlab/errors.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/io.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/summation.hpp"
#include "mhdlab/weights.hpp"

namespace mhdlab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{
      "simulate",       "verify-energy", "verify-weighted", "verify-pressure",
      "verify-scaling", "dss-generate",  "eps-study",       "operator-ratios"};
  return names;
}

namespace {

struct Report {
  ojson checks = ojson::array();
  ojson values = ojson::object();
  bool ok = true;

  // measured <= tolerance unless `pass` is given explicitly
  void check(const std::string& name, const std::string& anchor, double measured,
             double tolerance, bool pass) {
    ojson c;
    c["name"] = name;
    c["anchor"] = anchor;
    c["measured"] = measured;
    c["tolerance"] = tolerance;
    c["pass"] = pass;
    checks.push_back(c);
    ok = ok && pass;
  }
  void at_most(const std::string& name, const std::string& anchor, double measured,
               double tolerance) {
    check(name, anchor, measured, tolerance, std::isfinite(measured) && measured <= tolerance);
  }
};

struct Context {
  Config cfg;
  fs::path out;
  std::string command;
};

void write_report(const Context& ctx, const Report& r) {
  ojson j;
  j["command"] = ctx.command;
  j["seed"] = ctx.cfg.seed;
  j["grid"] = {{"N", ctx.cfg.sim.grid.n()}, {"L", ctx.cfg.sim.grid.length()}};
  j["pass"] = r.ok;
  j["checks"] = r.checks;
  j["values"] = r.values;
  std::ofstream os(ctx.out / "report.json", std::ios::trunc);
  os << j.dump(2) << "\n";
  if (!os) throw Error("cannot write report.json");
}

std::string gamma_tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

void write_snapshots(const Trajectory& tr, const Grid& g, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.mhdw", i);
    write_snapshot(tr.states[i], g, (dir / name).string());
  }
}

// Ledger CSVs: the gamma = 0 balance in ledgers.csv, weighted ones beside it.
void write_all_ledgers(const Trajectory& tr, const std::vector<double>& gammas,
                       const fs::path& out) {
  write_ledgers(cumulative_ledgers(tr, 0.0), (out / "ledgers.csv").string());
  for (double g : gammas)
    if (g != 0.0)
      write_ledgers(cumulative_ledgers(tr, g),
                    (out / ("ledgers_gamma_" + gamma_tag(g) + ".csv")).string());
}

Trajectory run_solver(const Context& ctx, const SimConfig& sim) {
  try {
    return solve_mhdg(sim);
  } catch (const BlowUp& e) {
    write_snapshot(e.last_valid(), sim.grid, (ctx.out / "blowup_last_valid.mhdw").string());
    throw;
  }
}

double initial_energy(const Trajectory& tr) {
  const auto& s = tr.states.front();
  const double a = l2_norm(s.u), b = l2_norm(s.b);
  return a * a + b * b;
}

double max_abs_slack(const std::vector<EnergyLedger>& ls) {
  double m = 0.0;
  for (const auto& l : ls) m = std::max(m, std::abs(l.slack));
  return m;
}

double min_slack(const std::vector<EnergyLedger>& ls) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : ls) m = std::min(m, l.slack);
  return m;
}

// max |q| of the limit system (v, c) = (u, b) relative to max|u| max|b|.
double q_vanishing(const Trajectory& tr) {
  double worst = 0.0;
  for (const auto& s : tr.states) {
    const auto pq = compute_p_q(s.u, s.b, s.u, s.b, s.F, TensorField(s.u.grid()));
    const double scale = max_abs(s.u) * max_abs(s.b);
    const double q = max_abs(pq.second);
    worst = std::max(worst, scale > 0.0 ? q / scale : q);
  }
  return worst;
}

// max |q| of the stored (mollified) states, same normalization.
double q_mollified(const Trajectory& tr) {
  double worst = 0.0;
  for (const auto& s : tr.states) {
    if (s.q.is_zero()) continue;
    const double scale = max_abs(s.u) * max_abs(s.b);
    const double q = max_abs(s.q);
    worst = std::max(worst, scale > 0.0 ? q / scale : q);
  }
  return worst;
}

double max_divergence(const Trajectory& tr) {
  double worst = 0.0;
  for (const auto& s : tr.states)
    worst = std::max({worst, relative_divergence(s.u), relative_divergence(s.b)});
  return worst;
}

int cmd_simulate(Context& ctx) {
  const SimConfig& sim = ctx.cfg.sim;
  const Trajectory tr = run_solver(ctx, sim);
  write_snapshots(tr, sim.grid, ctx.out / "snapshots");
  write_all_ledgers(tr, ctx.cfg.gammas, ctx.out);
  Report r;
  bool finite = true;
  for (const auto& s : tr.states) finite = finite && all_finite(s.u) && all_finite(s.b);
  r.check("solution finite", "mollified system is globally well posed", finite ? 0.0 : 1.0, 0.0,
          finite);
  r.at_most("divergence-free outputs", "incompressibility of u and b", max_divergence(tr), 1e-10);
  const double E0 = initial_energy(tr);
  const auto global = cumulative_ledgers(tr, 0.0);
  r.values["snapshots"] = tr.states.size();
  r.values["initial_energy"] = E0;
  r.values["final_time"] = tr.states.back().t;
  r.values["global_slack_max_abs"] = global.empty() ? 0.0 : max_abs_slack(global);
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

int cmd_verify_energy(Context& ctx) {
  const SimConfig& sim = ctx.cfg.sim;
  const Trajectory tr = run_solver(ctx, sim);
  write_all_ledgers(tr, ctx.cfg.gammas, ctx.out);
  Report r;
  const double E0 = initial_energy(tr);
  const auto global = cumulative_ledgers(tr, 0.0);
  const double rel = E0 > 0.0 ? max_abs_slack(global) / E0 : max_abs_slack(global);
  r.at_most("global energy equality", "global-energy-equality", rel, 1e-6);
  if (sim.F.is_zero() && sim.G.is_zero()) {
    double rise = 0.0;
    for (std::size_t i = 1; i < tr.rows.size(); ++i)
      rise = std::max(rise, tr.rows[i].ledgers[0].second.energy -
                                tr.rows[i - 1].ledgers[0].second.energy);
    r.check("energy non-increasing without forcing", "global-energy-equality", rise, 0.0,
            rise <= 0.0);
  }
  if (sim.G.is_zero())
    r.at_most("q vanishes when G = 0", "G-zero-implies-q-zero", q_vanishing(tr), 1e-10);
  ojson weighted = ojson::object();
  for (double g : ctx.cfg.gammas) {
    if (g == 0.0) continue;
    const auto ls = cumulative_ledgers(tr, g);
    const double m = min_slack(ls);
    r.check("weighted energy inequality gamma=" + gamma_tag(g), "weighted-energy-control",
            m / E0, -1e-6, m >= -1e-6 * E0);
    ojson terms = ojson::object();
    for (std::size_t i = 0; i < kLedgerTerms.size(); ++i) terms[kLedgerTerms[i]] = ls.back().terms[i];
    terms["slack"] = ls.back().slack;
    weighted[gamma_tag(g)] = terms;
  }
  ojson local = ojson::array();
  for (const auto& t : sim.local_tests) {
    const double res = local_energy_residual(tr, t);
    const double nrm = local_test_norm(tr, t);
    r.at_most("local energy equality (t0=" + gamma_tag(t.t0) + ", t1=" + gamma_tag(t.t1) + ")",
              "local-energy-equality", std::abs(res), 1e-5 * nrm * E0);
    local.push_back({{"t0", t.t0}, {"t1", t.t1}, {"eta", t.eta}, {"radius", t.radius},
                     {"residual", res}, {"test_norm", nrm}});
  }
  r.values["initial_energy"] = E0;
  r.values["global_slack_final"] = global.back().slack;
  r.values["global_relative_slack_max"] = rel;
  r.values["q_mollified_relative_max"] = q_mollified(tr);
  r.values["weighted_final"] = weighted;
  r.values["local_energy_residuals"] = local;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

double time_integral(const std::vector<double>& t, const std::vector<double>& y) {
  return pairwise_sum(interval_integrals(t, y));
}

// sum (|v|^2 + |c|^2)^{3/2} w h^3
double pair_l3_cubed(const VectorField& v, const VectorField& c, const std::vector<double>& w) {
  const Grid& g = v.grid();
  std::array<const std::vector<double>*, 6> f{};
  static const std::vector<double> none;
  for (int a = 0; a < 3; ++a) {
    f[a] = v.is_zero() ? &none : &v[a].physical();
    f[3 + a] = c.is_zero() ? &none : &c[a].physical();
  }
  return g.cell_volume() * pairwise_sum(g.size(), [&](std::size_t x) {
    double s = 0.0;
    for (const auto* p : f)
      if (!p->empty()) s += (*p)[x] * (*p)[x];
    return s * std::sqrt(s) * w[x];
  });
}

double tensor_weighted_sq(const TensorField& T, const Weight& w) {
  if (T.is_zero()) return 0.0;
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double n = weighted_lp_norm(T.at(i, j), 2.0, w);
      s += n * n;
    }
  return s;
}

struct PassiveControl {
  double measured = 0.0;
  double bound = 0.0;
  double calibrated = 0.0;
  double horizon = 0.0;
};

// Advection-diffusion run with the drifts of a short solver run, compared with
// the passive control bound at the configured constant.
PassiveControl passive_control(const SimConfig& base, double gamma) {
  SimConfig ad = base;
  const long steps = std::min<long>(20, std::lround(base.t_end / base.dt));
  ad.t_end = steps * base.dt;
  ad.snapshot_every = 1;
  ad.ledger_gammas = {gamma};
  ad.local_tests.clear();
  ad.keep_derived = true;
  const Trajectory drive = solve_mhdg(ad);
  const Trajectory tr = solve_ad(ad, drive.states.front(), drifts_of(drive));
  const Grid& g = ad.grid;
  const Weight w = make_weight(gamma, g);
  const std::vector<double> wv = weight_field(w, g).physical();
  std::vector<double> t, vc, fs, gs;
  for (const auto& s : tr.states) {
    t.push_back(s.t);
    vc.push_back(pair_l3_cubed(s.v, s.c, wv));
    fs.push_back(tensor_weighted_sq(s.F, w));
    gs.push_back(tensor_weighted_sq(s.G, w));
  }
  PassiveControl out;
  for (const auto& l : cumulative_ledgers(tr, gamma))
    out.measured = std::max(out.measured, l.term("kinetic_magnetic_energy_b") + l.term("dissipation"));
  const auto& s0 = tr.states.front();
  const double u0 = weighted_lp_norm(s0.u, 2.0, w), b0 = weighted_lp_norm(s0.b, 2.0, w);
  const double Fi = time_integral(t, fs), Gi = time_integral(t, gs), V = time_integral(t, vc);
  auto bound = [&](double C) { return passive_control_bound(u0, b0, Fi, Gi, V, ad.t_end, C); };
  out.bound = bound(base.control_constant);
  out.horizon = ad.t_end;
  double lo = 0.0, hi = 1e3;
  if (bound(lo) >= out.measured) {
    out.calibrated = 0.0;
  } else if (bound(hi) < out.measured) {
    out.calibrated = std::numeric_limits<double>::infinity();
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bound(mid) >= out.measured ? hi : lo) = mid;
    }
    out.calibrated = hi;
  }
  return out;
}

int cmd_verify_weighted(Context& ctx) {
  const SimConfig& base = ctx.cfg.sim;
  SimConfig fine = base;
  const int nf = ctx.cfg.refine_n > 0 ? ctx.cfg.refine_n : 3 * base.grid.n() / 2 + (3 * base.grid.n() / 2) % 2;
  fine.grid = Grid(nf, base.grid.length(), base.grid.dealias_fraction());
  fine.dt = ctx.cfg.refine_dt > 0.0 ? ctx.cfg.refine_dt : 0.5 * base.dt;
  const double ratio = base.dt / fine.dt;
  fine.ledger_every = std::max(1, static_cast<int>(std::lround(base.ledger_every * ratio)));
  fine.snapshot_every = std::max(1, static_cast<int>(std::lround(base.snapshot_every * ratio)));
  Report r;
  ojson levels = ojson::array();
  std::vector<std::vector<double>> mags;
  double E0 = 0.0;
  for (const SimConfig* sim : std::initializer_list<const SimConfig*>{&base, &fine}) {
    const Trajectory tr = run_solver(ctx, *sim);
    if (sim == &base) {
      E0 = initial_energy(tr);
      write_all_ledgers(tr, ctx.cfg.gammas, ctx.out);
    }
    ojson lvl;
    lvl["N"] = sim->grid.n();
    lvl["dt"] = sim->dt;
    std::vector<double> m;
    for (double g : ctx.cfg.gammas) {
      if (g == 0.0) continue;
      const auto ls = cumulative_ledgers(tr, g);
      const double lo = min_slack(ls);
      m.push_back(max_abs_slack(ls));
      r.check("weighted slack lower bound gamma=" + gamma_tag(g) + " N=" +
                  std::to_string(sim->grid.n()),
              "weighted-energy-control", lo / E0, -1e-6, lo >= -1e-6 * E0);
      lvl["gamma_" + gamma_tag(g)] = {{"min_slack", lo}, {"max_abs_slack", m.back()}};
    }
    mags.push_back(m);
    levels.push_back(lvl);
  }
  for (std::size_t i = 0; i < mags[0].size(); ++i)
    r.check("slack decreases under refinement (entry " + std::to_string(i) + ")",
            "weighted-energy-control", mags[1][i], mags[0][i], mags[1][i] < mags[0][i]);

  // Groenwall certificate on synthetic saturating trajectories
  std::mt19937_64 rng(ctx.cfg.seed);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const double A = U(rng), B = U(rng), T0 = U(rng);
    const auto c = gronwall_bound(A, B, 10.0, T0);
    std::vector<double> ts;
    for (int i = 1; i <= 50; ++i) ts.push_back(c.T1 * i / 50.0);
    const auto a = gronwall_ode(A, B, 0.999, ts);
    for (double v : a) worst_margin = std::min(worst_margin, c.bound - v);
  }
  r.check("Groenwall bound holds with margin", "nonnegative-bounded-measurable-function",
          worst_margin, 0.0, worst_margin > 0.0);
  const auto unit = gronwall_bound(1.0, 1.0, 10.0, 1.0);
  r.at_most("Groenwall unit case T1 = 1/16", "nonnegative-bounded-measurable-function",
            std::abs(unit.T1 - 1.0 / 16.0), 1e-15);
  r.at_most("Groenwall unit case bound = 2 sqrt 2", "nonnegative-bounded-measurable-function",
            std::abs(unit.bound - 2.0 * std::sqrt(2.0)), 1e-15);
  const double pg = ctx.cfg.gammas.empty() ? base.gamma : ctx.cfg.gammas.front();
  const PassiveControl pcb = passive_control(base, pg);
  r.check("advection-diffusion energy within the passive control bound",
          "passive-control-by-drifts", pcb.measured, pcb.bound, pcb.measured <= pcb.bound);
  r.values["initial_energy"] = E0;
  r.values["levels"] = levels;
  r.values["passive_control"] = {{"gamma", pg},         {"horizon", pcb.horizon},
                                 {"measured", pcb.measured}, {"bound", pcb.bound},
                                 {"calibrated_constant", pcb.calibrated}};
  r.values["control_constant"] = base.control_constant;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

VectorField advect(const VectorField& v, const VectorField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int j = 0; j < 3; ++j) {
    ScalarField s(g);
    for (int i = 0; i < 3; ++i) s = s + product(v[i], partial(f[j], i));
    out[j] = s;
  }
  return out;
}

int cmd_verify_pressure(Context& ctx) {
  const SimConfig& sim = ctx.cfg.sim;
  const Grid& g = sim.grid;
  Report r;

  // discrete cancellation of the transport terms
  double worst_self = 0.0, worst_cross = 0.0;
  InitialSpec rnd;
  rnd.type = "random";
  rnd.modes = 3;
  for (int i = 0; i < ctx.cfg.cancellation_triples; ++i) {
    auto [v, b] = make_initial(rnd, g, ctx.cfg.seed + 2 * static_cast<std::uint64_t>(i));
    auto [c, u] = make_initial(rnd, g, ctx.cfg.seed + 2 * static_cast<std::uint64_t>(i) + 1);
    const VectorField vb = advect(v, b);
    worst_self = std::max(worst_self, std::abs(inner(vb, b)) / (l2_norm(vb) * l2_norm(b)));
    const VectorField cb = advect(c, b), cu = advect(c, u);
    const double cross = inner(cb, u) + inner(cu, b);
    const double scale = l2_norm(cb) * l2_norm(u) + l2_norm(cu) * l2_norm(b);
    worst_cross = std::max(worst_cross, std::abs(cross) / scale);
  }
  r.at_most("<(v.grad)b, b> = 0", "transport-cancellation", worst_self, 1e-12);
  r.at_most("<(c.grad)b, u> + <(c.grad)u, b> = 0", "transport-cancellation", worst_cross, 1e-12);

  // pressure characterization on solver output
  SimConfig s2 = sim;
  const long steps = std::lround(sim.t_end / sim.dt);
  const int samples = std::max(1, ctx.cfg.pressure_samples);
  s2.snapshot_every = std::max<long>(1, steps / samples);
  s2.ledger_gammas.clear();
  s2.local_tests.clear();
  const Trajectory tr = run_solver(ctx, s2);
  double worst_div = 0.0;
  int used = 0;
  for (const auto& s : tr.states) {
    if (used >= samples) break;
    if (s.t == 0.0 && tr.states.size() > static_cast<std::size_t>(samples)) continue;
    auto [ru, rb] = assembled_rhs(s);
    worst_div = std::max({worst_div, relative_divergence(ru), relative_divergence(rb)});
    ++used;
  }
  r.at_most("assembled right-hand side is divergence-free", "pressure-characterization",
            worst_div, 1e-10);
  if (sim.G.is_zero())
    r.at_most("q vanishes when G = 0", "G-zero-implies-q-zero", q_vanishing(tr), 1e-10);
  double pmem = 0.0;
  for (const auto& s : tr.states) pmem = std::max(pmem, pressure_membership_norm(s.p, sim.gamma));
  r.values["pressure_samples_used"] = used;
  r.values["pressure_weighted_norm_max"] = pmem;

  // Picard construction on a window of half the existence time
  auto [u0, b0] = make_initial(sim.initial, g, sim.seed);
  const double fnorm = forcing_l2l2_norm(sim, sim.t_end);
  const double T0 = existence_time(u0, b0, fnorm, sim.epsilon, sim.picard.existence_c, sim.t_end);
  SimConfig pc = sim;
  pc.ledger_gammas.clear();
  pc.local_tests.clear();
  const int M = std::max(1, sim.picard.window_steps);
  pc.dt = 0.5 * T0 / M;
  SimState st;
  st.u = u0;
  st.b = b0;
  const PicardResult lin = picard_solve(pc, st, 0.5 * T0, PicardStart::linear);
  const PicardResult zer = picard_solve(pc, st, 0.5 * T0, PicardStart::zero);
  double agree = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < lin.trajectory.states.size(); ++i) {
    const auto& a = lin.trajectory.states[i];
    const auto& b = zer.trajectory.states[i];
    const double du = l2_norm(a.u - b.u), db = l2_norm(a.b - b.b);
    agree = std::max(agree, std::sqrt(du * du + db * db));
    const double nu = l2_norm(a.u), nb = l2_norm(a.b);
    scale = std::max(scale, std::sqrt(nu * nu + nb * nb));
  }
  r.check("Picard contraction factor < 1", "picard-contraction", lin.contraction, 1.0,
          lin.contraction < 1.0);
  r.check("Picard iterate distances decay geometrically", "picard-contraction",
          lin.ratios.empty() ? 0.0 : lin.ratios.front(), lin.contraction, lin.geometric);
  r.at_most("distinct starting iterates agree", "picard-contraction",
            scale > 0.0 ? agree / scale : agree, 10.0 * sim.picard.tol);
  // calibrated constant of the existence time over a small battery; large
  // amplitudes put the contraction threshold below the one-unit window cap
  std::vector<SimConfig> battery;
  for (const char* type : {"random", "localized", "orszag_tang"}) {
    for (double amp : {10.0, 100.0}) {
      SimConfig b = pc;
      b.initial.type = type;
      b.initial.amplitude = amp;
      b.t_end = 1.0;
      battery.push_back(b);
    }
  }
  const double c_cal = calibrate_existence_constant(battery, 0.9);
  r.check("configured existence constant within the calibrated range", "picard-contraction",
          sim.picard.existence_c, c_cal, sim.picard.existence_c <= c_cal);
  r.values["existence_time"] = T0;
  r.values["existence_c"] = sim.picard.existence_c;
  r.values["existence_c_calibrated"] = c_cal;
  r.values["picard_window"] = 0.5 * T0;
  r.values["picard_distances"] = lin.distances;
  r.values["picard_ratios"] = lin.ratios;
  r.values["picard_distances_zero_start"] = zer.distances;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

int cmd_verify_scaling(Context& ctx) {
  const double lambda = ctx.cfg.lambda;
  Report r;
  SimConfig lin = ctx.cfg.sim;
  lin.initial.amplitude = ctx.cfg.linear_amplitude;
  const ScalingReport a = scaling_covariance_check(lin, lambda);
  const ScalingReport b = scaling_covariance_check(ctx.cfg.sim, lambda);
  r.at_most("two-box covariance, linear regime", "scaling-of-the-equations", a.max_rel_diff, 1e-8);
  r.at_most("two-box covariance, nonlinear regime", "scaling-of-the-equations", b.max_rel_diff,
            1e-6);
  const ScalingReport c = scaling_covariance_check(ctx.cfg.sim, lambda, true);
  r.at_most("covariance difference unchanged by a joint axis rotation", "scaling-of-the-equations",
            std::abs(c.max_rel_diff - b.max_rel_diff), 1e-12);
  r.values["lambda"] = lambda;
  r.values["linear_rel_diff"] = a.rel_diff;
  r.values["nonlinear_rel_diff"] = b.rel_diff;
  r.values["times"] = b.times;
  r.values["max_relative_difference"] = std::max(a.max_rel_diff, b.max_rel_diff);
  r.values["rotated_max_relative_difference"] = c.max_rel_diff;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

int cmd_dss_generate(Context& ctx) {
  const auto& d = ctx.cfg.dss;
  DssGenerator gen;
  gen.lambda = d.lambda;
  gen.swirl = d.swirl;
  gen.poloidal = d.poloidal;
  gen.has_forcing = true;
  DssSampling smp;
  smp.half_points = d.half_points;
  smp.half_width = d.half_width;
  const DssField u = dss_extend(gen, smp);
  const auto pts = dyadic_sample_points(u);
  bool interp = false;
  const double res = dss_residual(u, pts, &interp);
  Report r;
  r.at_most("discrete self-similarity at lattice points", "dss-definition",
            res / u.scale(), 1e-12);

  double div = 0.0, gscale = 0.0;
  std::mt19937_64 rng(ctx.cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double forcing_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Point x{gen.lambda * U(rng), gen.lambda * U(rng), gen.lambda * U(rng)};
    div = std::max(div, std::abs(gen.divergence(x)));
    const Point gv = gen.g(x);
    gscale = std::max(gscale, std::sqrt(gv[0] * gv[0] + gv[1] * gv[1] + gv[2] * gv[2]));
    const Point y{4.0 * U(rng), 4.0 * U(rng), 4.0 * U(rng)};
    if (y[0] == 0.0 && y[1] == 0.0 && y[2] == 0.0) continue;
    const double t = 0.5 + 0.5 * (U(rng) + 1.0);
    const auto lhs = dss_forcing_value(gen, gen.lambda * gen.lambda * t, y);
    const auto rhs = dss_forcing_value(gen, t, {y[0] / gen.lambda, y[1] / gen.lambda, y[2] / gen.lambda});
    for (int k = 0; k < 9; ++k) {
      const double ref = rhs[k] / (gen.lambda * gen.lambda);
      forcing_err = std::max(forcing_err, std::abs(lhs[k] - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  r.at_most("generator is divergence-free", "dss-definition", div / std::max(gscale, 1e-300),
            1e-12);
  r.at_most("forcing scaling F(l^2 t, y) = l^-2 F(t, y / l)", "dss-definition", forcing_err, 1e-12);

  std::vector<double> radii;
  for (int n = d.shell_first; n <= d.shell_last; ++n) radii.push_back(std::pow(d.lambda, n));
  const auto studies = dss_weighted_norm_study(u, d.gammas, radii);
  ojson st = ojson::array();
  for (const auto& s : studies) {
    double dev = 0.0;
    for (double q : s.ratios) dev = std::max(dev, std::abs(q / s.expected_ratio - 1.0));
    r.at_most("shell ratios near lambda^(1-gamma), gamma=" + gamma_tag(s.gamma),
              "dss-definition", dev, 0.1);
    const bool expect_conv = s.gamma > 1.0;
    bool trend = true;
    for (double q : s.ratios) trend = trend && (expect_conv ? q < 1.0 : q > 1.0);
    r.check(std::string(expect_conv ? "weighted norm converges" : "weighted norm diverges") +
                ", gamma=" + gamma_tag(s.gamma),
            "dss-definition", s.ratios.empty() ? 0.0 : s.ratios.back(), 1.0, trend);
    st.push_back({{"gamma", s.gamma}, {"radii", s.radii}, {"norms", s.norms},
                  {"ratios", s.ratios}, {"expected_ratio", s.expected_ratio}});
  }
  // band-limited periodic sample of the DSS data for use as initial data
  InitialSpec is;
  is.type = "dss";
  auto [u0, b0] = make_initial(is, ctx.cfg.sim.grid, ctx.cfg.seed);
  SimState s;
  s.u = u0;
  s.b = b0;
  const Grid& g = ctx.cfg.sim.grid;
  s.v = VectorField(g);
  s.c = VectorField(g);
  s.p = ScalarField(g);
  s.q = ScalarField(g);
  s.F = TensorField(g);
  s.G = TensorField(g);
  fs::create_directories(ctx.out / "snapshots");
  write_snapshot(s, g, (ctx.out / "snapshots" / "dss_initial.mhdw").string());
  r.values["lambda"] = d.lambda;
  r.values["lattice_points"] = pts.size();
  r.values["residual"] = res;
  r.values["scale"] = u.scale();
  r.values["interpolated"] = interp;
  r.values["shell_studies"] = st;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

int cmd_eps_study(Context& ctx) {
  if (ctx.cfg.eps_list.empty()) throw ConfigError({"eps_list: required for eps-study"});
  std::vector<double> eps;
  for (double e : ctx.cfg.eps_list) eps.push_back(e * ctx.cfg.sim.grid.length());
  const EpsStudy s = epsilon_convergence_study(ctx.cfg.sim, eps);
  Report r;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.distances.size(); ++i)
    worst = std::max(worst, s.distances[i] / s.distances[i - 1]);
  if (s.distances.size() >= 2)
    r.check("consecutive distances strictly decrease", "decreasing-eps-sequence", worst, 1.0,
            s.strictly_decreasing);
  r.values["eps"] = s.eps;
  r.values["eps_fraction_of_L"] = ctx.cfg.eps_list;
  r.values["distances"] = s.distances;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

int cmd_operator_ratios(Context& ctx) {
  const auto& o = ctx.cfg.ratios;
  const Grid g(o.n, ctx.cfg.sim.grid.length());
  const Kernel k = make_kernel(ctx.cfg.sim.kernel, o.kernel_epsilon * g.length(), g);
  const double Cdom = domination_constant(k);
  std::mt19937_64 rng(ctx.cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = g.n();
  const int cut = std::min(o.modes, g.dealias_cutoff());
  bool finite = true;
  double riesz_l2 = 0.0, max_maximal = 0.0, max_conv = 0.0, sob = 0.0;
  const OperatorKind riesz[3] = {OperatorKind::riesz1, OperatorKind::riesz2, OperatorKind::riesz3};
  std::vector<double> conv_ratios, maximal_ratios;
  for (int f = 0; f < o.fields; ++f) {
    std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
    for (int z = 0; z < n; ++z)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          if (std::abs(g.mode(x)) > cut || std::abs(g.mode(y)) > cut || std::abs(g.mode(z)) > cut)
            continue;
          const double re = U(rng), im = U(rng);
          c[g.index(x, y, z)] = cplx(re, im);
        }
    const ScalarField fld = ScalarField::from_spectral(g, std::move(c));
    for (double p : o.p_list)
      for (double d : o.delta_list) {
        for (auto op : riesz) {
          const double q = operator_weighted_ratio(op, fld, p, d);
          finite = finite && std::isfinite(q);
          if (d == 0.0 && p == 2.0) riesz_l2 = std::max(riesz_l2, q);
        }
        const double m = operator_weighted_ratio(OperatorKind::maximal, fld, p, d);
        const double cv = operator_weighted_ratio(OperatorKind::convolve, fld, p, d, &k);
        finite = finite && std::isfinite(m) && std::isfinite(cv);
        max_maximal = std::max(max_maximal, m);
        max_conv = std::max(max_conv, cv);
        conv_ratios.push_back(cv);
        maximal_ratios.push_back(m);
      }
    for (double d : o.delta_list) {
      try {
        const double s = sobolev_embedding_ratio(fld, d);
        finite = finite && std::isfinite(s);
        sob = std::max(sob, s);
      } catch (const UndefinedRatio&) {
        finite = false;
      }
    }
  }
  Report r;
  r.check("all ratios finite", "weighted-maximal-and-riesz-bounds", finite ? 0.0 : 1.0, 0.0,
          finite);
  r.at_most("Riesz ratio at delta=0, p=2", "weighted-maximal-and-riesz-bounds", riesz_l2,
            1.0 + 1e-12);
  const double bound = Cdom * max_maximal;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < conv_ratios.size(); ++i)
    worst = std::max(worst, conv_ratios[i] - Cdom * maximal_ratios[i]);
  r.check("mollification bounded by C_theta times the maximal ratio",
          "weighted-maximal-and-riesz-bounds", worst, 0.0, worst <= 1e-12 * bound);
  r.values["fields"] = o.fields;
  r.values["domination_constant"] = Cdom;
  r.values["mollification_constant"] = bound;
  r.values["max_mollification_ratio"] = max_conv;
  r.values["max_maximal_ratio"] = max_maximal;
  r.values["max_sobolev_ratio"] = sob;
  r.values["riesz_l2_ratio"] = riesz_l2;
  write_report(ctx, r);
  return r.ok ? 0 : 1;
}

}  // namespace

int run(const RunOptions& opts) {
  try {
    Context ctx;
    ctx.command = opts.command;
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), opts.command) == names.end())
      throw Error("unknown command: " + opts.command);
    ctx.cfg = parse_config(opts.config_path);
    if (opts.seed) {
      ctx.cfg.seed = *opts.seed;
      ctx.cfg.sim.seed = *opts.seed;
    }
    ctx.out = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(ctx.cfg.out);
    fs::create_directories(ctx.out);
    if (opts.command == "simulate") return cmd_simulate(ctx);
    if (opts.command == "verify-energy") return cmd_verify_energy(ctx);
    if (opts.command == "verify-weighted") return cmd_verify_weighted(ctx);
    if (opts.command == "verify-pressure") return cmd_verify_pressure(ctx);
    if (opts.command == "verify-scaling") return cmd_verify_scaling(ctx);
    if (opts.command == "dss-generate") return cmd_dss_generate(ctx);
    if (opts.command == "eps-study") return cmd_eps_study(ctx);
    return cmd_operator_ratios(ctx);
  } catch (const std::exception& e) {
    std::cerr << "mhdlab " << opts.command << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mhdlab
