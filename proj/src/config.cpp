#include "mhdlab/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "mhdlab/errors.hpp"

namespace mhdlab {

namespace {

using json = nlohmann::json;

// Walks one JSON object, recording every violation under its key path.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errs)
      : obj_(obj), path_(std::move(path)), errs_(errs) {
    if (!obj_.is_object()) fail("", "must be an object");
  }

  ~Reader() = default;

  void finish() {
    if (!obj_.is_object()) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  void fail(const std::string& key, const std::string& msg) {
    errs_.push_back(name(key) + ": " + msg);
  }

  std::string name(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& at(const std::string& key) const { return obj_.at(key); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) return fail(key, "must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(key, "must be finite");
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) return fail(key, "must be an integer");
    out = v.get<int>();
  }

  void u64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      return fail(key, "must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_boolean()) return fail(key, "must be true or false");
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) return fail(key, "must be a string");
    out = v.get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array()) return fail(key, "must be an array of numbers");
    std::vector<double> r;
    for (const auto& e : v) {
      if (!e.is_number()) return fail(key, "must be an array of numbers");
      r.push_back(e.get<double>());
    }
    out = r;
  }

  void positive(const std::string& key, double v) {
    if (seen_.count(key) && obj_.contains(key) && !(v > 0.0)) fail(key, "must be positive");
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

ForcingSpec forcing_from(const json& j, const std::string& path, double L,
                         std::vector<std::string>& errs) {
  Reader r(j, path, errs);
  std::string type = "zero";
  double amplitude = 1.0, wavenumber = 1.0, omega = 0.0, lambda = 2.0;
  double cutoff = 0.2, swirl = 1.0, poloidal = 0.5;
  r.string("type", type);
  r.number("amplitude", amplitude);
  r.number("wavenumber", wavenumber);
  r.number("omega", omega);
  r.number("lambda", lambda);
  r.number("cutoff_radius", cutoff);
  r.number("swirl", swirl);
  r.number("poloidal", poloidal);
  r.finish();
  ForcingSpec f;
  if (type == "zero") return f;
  if (type == "sinusoidal") {
    const double k = wavenumber, A = amplitude, w = omega;
    f.fn = [k, A, w](double t, const Point& x) {
      std::array<double, 9> e{};
      const double s = A * std::cos(w * t);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          e[3 * i + j] = s * std::sin(k * x[(i + j + 1) % 3] + 0.5 * i - 0.25 * j);
      return e;
    };
    f.time_dependent = omega != 0.0;
    f.description = "sinusoidal";
    return f;
  }
  if (type == "dss") {
    if (!(lambda > 1.0)) r.fail("lambda", "must exceed 1");
    if (!(cutoff > 0.0 && cutoff <= 0.25)) r.fail("cutoff_radius", "must lie in (0, 0.25] (fraction of L)");
    DssGenerator gen;
    gen.lambda = lambda;
    gen.swirl = swirl;
    gen.poloidal = poloidal;
    gen.has_forcing = true;
    gen.forcing_amplitude = amplitude;
    Cutoff cut;
    cut.radius = cutoff * L;
    cut.center = {0.5 * L, 0.5 * L, 0.5 * L};
    const double core = 1e-3 * L;
    f.fn = [gen, cut, core](double t, const Point& x) {
      const Point y{x[0] - cut.center[0], x[1] - cut.center[1], x[2] - cut.center[2]};
      const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
      std::array<double, 9> e{};
      if (r < core || t <= 0.0) return e;
      const double phi = cut.value(x);
      if (phi == 0.0) return e;
      e = dss_forcing_value(gen, t, y);
      for (auto& v : e) v *= phi;
      return e;
    };
    f.time_dependent = true;
    f.description = "dss";
    return f;
  }
  r.fail("type", "unknown forcing type '" + type + "' (zero, sinusoidal, dss)");
  return f;
}

void read_initial(const json& j, InitialSpec& s, std::vector<std::string>& errs) {
  Reader r(j, "initial", errs);
  r.string("type", s.type);
  r.number("amplitude", s.amplitude);
  r.number("width", s.width);
  r.integer("modes", s.modes);
  r.string("path", s.path);
  r.number("dss_radius", s.dss_radius);
  r.finish();
  static const std::set<std::string> types{"zero",   "localized", "orszag_tang", "shear",
                                           "random", "dss",       "snapshot"};
  if (!types.count(s.type)) r.fail("type", "unknown initial data type '" + s.type + "'");
  if (!(s.width > 0.0 && s.width < 0.5)) r.fail("width", "must lie in (0, 0.5)");
  if (s.modes < 1) r.fail("modes", "must be >= 1");
  if (s.type == "snapshot" && s.path.empty()) r.fail("path", "required for snapshot data");
  if (!(s.dss_radius > 0.0 && s.dss_radius <= 0.25)) r.fail("dss_radius", "must lie in (0, 0.25]");
}

Config parse_json(const json& root) {
  std::vector<std::string> errs;
  Config cfg;
  Reader r(root, "", errs);
  int n = 16;
  double L = 2.0 * 3.14159265358979323846, frac = 2.0 / 3.0;
  double eps = -1.0;
  r.integer("N", n);
  r.number("L", L);
  r.number("dealias_fraction", frac);
  r.number("dt", cfg.sim.dt);
  r.number("t_end", cfg.sim.t_end);
  r.number("epsilon", eps);
  for (const char* k : {"N", "dt", "t_end", "epsilon"})
    if (!r.has(k)) r.fail(k, "required");
  std::string kernel = "gaussian_bump", variant = "fixed", driver = "rk4";
  r.string("kernel", kernel);
  r.string("variant", variant);
  r.string("driver", driver);
  r.number("gamma", cfg.sim.gamma);
  r.integer("snapshot_every", cfg.sim.snapshot_every);
  r.integer("ledger_every", cfg.sim.ledger_every);
  r.u64("seed", cfg.seed);
  r.numbers("gammas", cfg.gammas);
  r.boolean("keep_derived", cfg.sim.keep_derived);
  r.number("control_constant", cfg.sim.control_constant);
  r.numbers("eps_list", cfg.eps_list);
  r.number("lambda", cfg.lambda);
  r.string("out", cfg.out);
  r.number("linear_amplitude", cfg.linear_amplitude);
  r.integer("pressure_samples", cfg.pressure_samples);
  r.integer("cancellation_triples", cfg.cancellation_triples);
  r.integer("refine_n", cfg.refine_n);
  r.number("refine_dt", cfg.refine_dt);

  if (r.has("N") && (n < 8 || n % 2 != 0)) r.fail("N", "must be an even integer >= 8");
  r.positive("L", L);
  if (r.has("dealias_fraction") && !(frac > 0.0 && frac <= 1.0))
    r.fail("dealias_fraction", "must lie in (0, 1]");
  r.positive("dt", cfg.sim.dt);
  r.positive("t_end", cfg.sim.t_end);
  r.positive("epsilon", eps);
  if (cfg.sim.dt > 0.0 && cfg.sim.t_end > 0.0 && cfg.sim.t_end < cfg.sim.dt)
    r.fail("t_end", "must be >= dt");
  if (!(cfg.sim.gamma >= 0.0 && cfg.sim.gamma < 3.0)) r.fail("gamma", "must lie in [0, 3)");
  for (double g : cfg.gammas)
    if (!(g >= 0.0 && g <= 2.0)) r.fail("gammas", "entries must lie in [0, 2]");
  if (cfg.sim.snapshot_every < 1) r.fail("snapshot_every", "must be >= 1");
  if (cfg.sim.ledger_every < 1) r.fail("ledger_every", "must be >= 1");
  r.positive("control_constant", cfg.sim.control_constant);
  r.positive("lambda", cfg.lambda);
  if (r.has("lambda") && !(cfg.lambda > 1.0)) r.fail("lambda", "must exceed 1");
  r.positive("linear_amplitude", cfg.linear_amplitude);
  if (cfg.pressure_samples < 1) r.fail("pressure_samples", "must be >= 1");
  if (cfg.cancellation_triples < 1) r.fail("cancellation_triples", "must be >= 1");
  if (r.has("refine_n") && (cfg.refine_n < 8 || cfg.refine_n % 2 != 0))
    r.fail("refine_n", "must be an even integer >= 8");
  if (r.has("refine_dt") && !(cfg.refine_dt > 0.0)) r.fail("refine_dt", "must be positive");
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    if (!(cfg.eps_list[i] > 0.0)) r.fail("eps_list", "entries must be positive");
    if (i > 0 && !(cfg.eps_list[i] < cfg.eps_list[i - 1]))
      r.fail("eps_list", "must be strictly decreasing");
  }

  try {
    cfg.sim.kernel = kernel_shape_from_string(kernel);
  } catch (const Error&) {
    r.fail("kernel", "unknown kernel '" + kernel + "' (gaussian_bump, polynomial_bump)");
  }
  if (variant == "fixed")
    cfg.sim.variant = MollifierVariant::fixed;
  else if (variant == "time_scaled")
    cfg.sim.variant = MollifierVariant::time_scaled;
  else
    r.fail("variant", "must be 'fixed' or 'time_scaled'");
  if (driver == "rk4")
    cfg.sim.driver = Driver::rk4;
  else if (driver == "picard")
    cfg.sim.driver = Driver::picard;
  else
    r.fail("driver", "must be 'rk4' or 'picard'");

  const bool grid_ok = n >= 8 && n % 2 == 0 && L > 0.0 && frac > 0.0 && frac <= 1.0;
  if (grid_ok) {
    cfg.sim.grid = Grid(n, L, frac);
    const double thr = resolvability_threshold(cfg.sim.grid);
    if (eps > 0.0) {
      cfg.sim.epsilon = eps * L;
      if (cfg.sim.variant == MollifierVariant::fixed && cfg.sim.epsilon < thr)
        r.fail("epsilon", "scale " + std::to_string(eps) +
                              " L is below the resolvability threshold 1.5h");
    }
    for (double e : cfg.eps_list)
      if (e > 0.0 && e * L < thr) {
        r.fail("eps_list", "entry " + std::to_string(e) + " L is below the resolvability threshold 1.5h");
        break;
      }
  }
  cfg.epsilon_fraction = eps;

  if (r.has("initial")) read_initial(r.at("initial"), cfg.sim.initial, errs);
  if (r.has("F")) cfg.sim.F = forcing_from(r.at("F"), "F", L, errs);
  if (r.has("G")) cfg.sim.G = forcing_from(r.at("G"), "G", L, errs);

  if (r.has("picard")) {
    Reader p(r.at("picard"), "picard", errs);
    p.number("tol", cfg.sim.picard.tol);
    p.integer("max_iters", cfg.sim.picard.max_iters);
    p.integer("window_steps", cfg.sim.picard.window_steps);
    p.number("existence_c", cfg.sim.picard.existence_c);
    p.finish();
    p.positive("tol", cfg.sim.picard.tol);
    if (cfg.sim.picard.max_iters < 1) p.fail("max_iters", "must be >= 1");
    if (cfg.sim.picard.window_steps < 1) p.fail("window_steps", "must be >= 1");
    p.positive("existence_c", cfg.sim.picard.existence_c);
  }

  if (r.has("local_tests")) {
    const json& lt = r.at("local_tests");
    if (!lt.is_array()) {
      r.fail("local_tests", "must be an array of objects");
    } else {
      for (std::size_t i = 0; i < lt.size(); ++i) {
        LocalTestSpec t;
        Reader q(lt[i], "local_tests[" + std::to_string(i) + "]", errs);
        q.number("t0", t.t0);
        q.number("t1", t.t1);
        q.number("eta", t.eta);
        q.number("radius", t.radius);
        q.finish();
        if (!(t.t0 >= 0.0)) q.fail("t0", "must be >= 0");
        if (!(t.t1 > t.t0)) q.fail("t1", "must exceed t0");
        if (!(t.eta > 0.0)) q.fail("eta", "must be positive");
        if (!(t.radius > 0.0 && t.radius <= 0.5)) q.fail("radius", "must lie in (0, 0.5]");
        cfg.sim.local_tests.push_back(t);
      }
    }
  }

  if (r.has("operator_ratios")) {
    auto& o = cfg.ratios;
    Reader q(r.at("operator_ratios"), "operator_ratios", errs);
    q.integer("fields", o.fields);
    q.integer("n", o.n);
    q.integer("modes", o.modes);
    q.numbers("p_list", o.p_list);
    q.numbers("delta_list", o.delta_list);
    q.number("kernel_epsilon", o.kernel_epsilon);
    q.finish();
    if (o.fields < 1) q.fail("fields", "must be >= 1");
    if (o.n < 8 || o.n % 2) q.fail("n", "must be an even integer >= 8");
    if (o.modes < 1) q.fail("modes", "must be >= 1");
    for (double p : o.p_list)
      if (!(p > 1.0) || !std::isfinite(p)) q.fail("p_list", "entries must lie in (1, inf)");
    for (double d : o.delta_list)
      if (!(d >= 0.0 && d < 3.0)) q.fail("delta_list", "entries must lie in [0, 3)");
    q.positive("kernel_epsilon", o.kernel_epsilon);
  }

  if (r.has("dss")) {
    auto& d = cfg.dss;
    Reader q(r.at("dss"), "dss", errs);
    q.number("lambda", d.lambda);
    q.number("swirl", d.swirl);
    q.number("poloidal", d.poloidal);
    q.integer("half_points", d.half_points);
    q.number("half_width", d.half_width);
    q.numbers("gammas", d.gammas);
    q.integer("shell_first", d.shell_first);
    q.integer("shell_last", d.shell_last);
    q.finish();
    if (!(d.lambda > 1.0)) q.fail("lambda", "must exceed 1");
    if (d.half_points < 2) q.fail("half_points", "must be >= 2");
    q.positive("half_width", d.half_width);
    if (d.shell_last < d.shell_first + 3) q.fail("shell_last", "need at least four shells");
    for (double g : d.gammas)
      if (!(g >= 0.0 && g < 3.0)) q.fail("gammas", "entries must lie in [0, 3)");
  }

  r.finish();
  cfg.sim.seed = cfg.seed;
  cfg.sim.ledger_gammas = cfg.gammas;
  if (!errs.empty()) throw ConfigError(errs);
  return cfg;
}

}  // namespace

Config parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: malformed JSON: ") + e.what()});
  }
  return parse_json(root);
}

Config parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError({"config file not found: " + path});
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

ForcingSpec forcing_from_json_text(const std::string& text) {
  std::vector<std::string> errs;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("forcing: malformed JSON: ") + e.what()});
  }
  ForcingSpec f = forcing_from(j, "forcing", 2.0 * 3.14159265358979323846, errs);
  if (!errs.empty()) throw ConfigError(errs);
  return f;
}

}  // namespace mhdlab
