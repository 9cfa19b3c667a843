#include "mhdlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mhdlab/spectral.hpp"
#include "mhdlab/summation.hpp"

namespace mhdlab {

double Weight::value(const Point& x) const {
  if (gamma == 0.0) return 1.0;
  const double dx = x[0] - center[0], dy = x[1] - center[1], dz = x[2] - center[2];
  const double r2 = dx * dx + dy * dy + dz * dz;
  const double s = std::sqrt(reg_epsilon * reg_epsilon + r2);
  return std::pow(1.0 + s, -gamma);
}

Point Weight::gradient(const Point& x) const {
  if (gamma == 0.0) return {0.0, 0.0, 0.0};
  const double dx = x[0] - center[0], dy = x[1] - center[1], dz = x[2] - center[2];
  const double r2 = dx * dx + dy * dy + dz * dz;
  const double s = std::sqrt(reg_epsilon * reg_epsilon + r2);
  if (s == 0.0) return {0.0, 0.0, 0.0};
  const double f = -gamma * std::pow(1.0 + s, -gamma - 1.0) / s;
  return {f * dx, f * dy, f * dz};
}

Weight make_weight(double gamma, const Grid& g, double reg_epsilon) {
  if (!(gamma >= 0.0 && gamma < 3.0))
    throw DomainError("weight: gamma must lie in [0, 3)");
  if (!(reg_epsilon >= 0.0)) throw DomainError("weight: reg_epsilon must be >= 0");
  const double c = 0.5 * g.length();
  return Weight{gamma, reg_epsilon, {c, c, c}};
}

ScalarField weight_field(const Weight& w, const Grid& g) {
  return ScalarField::sample(g, [&](double x, double y, double z) {
    return w.value({x, y, z});
  });
}

VectorField weight_gradient_field(const Weight& w, const Grid& g) {
  std::array<std::vector<double>, 3> c;
  for (auto& v : c) v.resize(g.size());
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto d = w.gradient({g.coord(i), g.coord(j), g.coord(k)});
        const std::size_t idx = g.index(i, j, k);
        for (int a = 0; a < 3; ++a) c[a][idx] = d[a];
      }
  return VectorField(ScalarField::from_physical(g, std::move(c[0])),
                     ScalarField::from_physical(g, std::move(c[1])),
                     ScalarField::from_physical(g, std::move(c[2])));
}

namespace {

double weighted_sum(const Grid& g, double p, const Weight& w,
                    const std::vector<double>& mag) {
  const ScalarField wf = weight_field(w, g);
  const auto& wv = wf.physical();
  const double s = pairwise_sum(mag.size(), [&](std::size_t i) {
    return std::pow(mag[i], p) * wv[i];
  });
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

void check_p(double p) {
  if (!(p >= 1.0)) throw DomainError("weighted_lp_norm: p must be >= 1");
}

}  // namespace

double weighted_lp_norm(const ScalarField& f, double p, const Weight& w) {
  check_p(p);
  if (f.is_zero()) return 0.0;
  std::vector<double> mag = f.physical();
  for (auto& v : mag) v = std::abs(v);
  return weighted_sum(f.grid(), p, w, mag);
}

double weighted_lp_norm(const VectorField& f, double p, const Weight& w) {
  check_p(p);
  if (f.is_zero()) return 0.0;
  const auto& a = f[0].physical();
  const auto& b = f[1].physical();
  const auto& c = f[2].physical();
  std::vector<double> mag(a.size());
  for (std::size_t i = 0; i < mag.size(); ++i)
    mag[i] = std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
  return weighted_sum(f.grid(), p, w, mag);
}

namespace {
double expm_inv(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double expm_inv_d(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }
}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = expm_inv(x), b = expm_inv(1.0 - x);
  return a / (a + b);
}

double smooth_step_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = expm_inv(x), b = expm_inv(1.0 - x);
  const double da = expm_inv_d(x), db = expm_inv_d(1.0 - x);
  const double den = a + b;
  return (da * b + a * db) / (den * den);
}

double Cutoff::value(const Point& x) const {
  const double dx = x[0] - center[0], dy = x[1] - center[1], dz = x[2] - center[2];
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  return 1.0 - smooth_step(r / radius - 1.0);
}

Point Cutoff::gradient(const Point& x) const {
  const double dx = x[0] - center[0], dy = x[1] - center[1], dz = x[2] - center[2];
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double f = -smooth_step_derivative(r / radius - 1.0) / (radius * r);
  return {f * dx, f * dy, f * dz};
}

Cutoff make_cutoff(double radius, const Grid& g) {
  if (!(radius > 0.0)) throw DomainError("cutoff: radius must be positive");
  if (2.0 * radius > 0.5 * g.length())
    throw DomainError("cutoff: 2R exceeds the box half-width");
  const double c = 0.5 * g.length();
  return Cutoff{radius, {c, c, c}};
}

ScalarField cutoff_field(const Cutoff& c, const Grid& g) {
  if (2.0 * c.radius > 0.5 * g.length())
    throw DomainError("cutoff: 2R exceeds the box half-width");
  return ScalarField::sample(g, [&](double x, double y, double z) {
    return c.value({x, y, z});
  });
}

double sobolev_embedding_ratio(const ScalarField& f, double delta) {
  const Grid& g = f.grid();
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw DomainError("sobolev_embedding_ratio: delta must be >= 0");
  // the box is bounded, so w_{3 delta} is fine for any delta
  const double c = 0.5 * g.length();
  const Weight w1{delta, 0.0, {c, c, c}};
  const Weight w3{3.0 * delta, 0.0, {c, c, c}};
  const double num = weighted_lp_norm(f, 6.0, w3);
  const double den = weighted_lp_norm(f, 2.0, w1) + weighted_lp_norm(gradient(f), 2.0, w1);
  if (den == 0.0) throw UndefinedRatio("sobolev_embedding_ratio: f vanishes");
  return num / den;
}

std::vector<int> maximal_radii(const Grid& g) {
  std::vector<int> r{0};
  for (int s = 1; s <= g.n() / 4; s *= 2) r.push_back(s);
  return r;
}

namespace {

// Periodic box sum of half-width s along one axis.
void box_sum_axis(const Grid& g, int axis, int s, const std::vector<double>& in,
                  std::vector<double>& out) {
  const int n = g.n();
  std::vector<double> line(n), pre(3 * n + 1);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      auto at = [&](int t) {
        if (axis == 0) return g.index(t, a, b);
        if (axis == 1) return g.index(a, t, b);
        return g.index(a, b, t);
      };
      for (int t = 0; t < n; ++t) line[t] = in[at(t)];
      pre[0] = 0.0;
      for (int t = 0; t < 3 * n; ++t) pre[t + 1] = pre[t] + line[t % n];
      for (int t = 0; t < n; ++t) out[at(t)] = pre[n + t + s + 1] - pre[n + t - s];
    }
}

}  // namespace

ScalarField maximal_function(const ScalarField& f) {
  const Grid& g = f.grid();
  if (f.is_zero()) return ScalarField(g);
  std::vector<double> absf = f.physical();
  for (auto& v : absf) v = std::abs(v);
  std::vector<double> best = absf;
  std::vector<double> t1(g.size()), t2(g.size());
  for (int s : maximal_radii(g)) {
    if (s == 0) continue;
    box_sum_axis(g, 0, s, absf, t1);
    box_sum_axis(g, 1, s, t1, t2);
    box_sum_axis(g, 2, s, t2, t1);
    const double side = 2.0 * s + 1.0;
    const double inv = 1.0 / (side * side * side);
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], t1[i] * inv);
  }
  return ScalarField::from_physical(g, std::move(best));
}

double domination_constant(const Kernel& k) {
  const Grid& g = k.grid;
  const int n = g.n();
  // level value -> largest Chebyshev extent among points at that value
  std::map<double, int, std::greater<double>> extent;
  std::size_t idx = 0;
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a, ++idx) {
        const double w = k.weights[idx];
        if (w <= 0.0) continue;
        const int e = std::max({std::min(a, n - a), std::min(b, n - b), std::min(c, n - c)});
        auto it = extent.find(w);
        if (it == extent.end()) extent.emplace(w, e);
        else it->second = std::max(it->second, e);
      }
  const auto radii = maximal_radii(g);
  double total = 0.0;
  int running = 0;
  for (auto it = extent.begin(); it != extent.end(); ++it) {
    running = std::max(running, it->second);
    auto r = std::lower_bound(radii.begin(), radii.end(), running);
    if (r == radii.end())
      throw DomainError("domination_constant: kernel support exceeds the largest cube");
    const double side = 2.0 * (*r) + 1.0;
    auto next = std::next(it);
    const double lower = next == extent.end() ? 0.0 : next->first;
    total += (it->first - lower) * side * side * side;
  }
  return total;
}

double operator_weighted_ratio(OperatorKind op, const ScalarField& f, double p,
                               double delta, const Kernel* kernel) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw DomainError("operator_weighted_ratio: p must lie in (1, inf)");
  if (!(delta >= 0.0 && delta < 3.0))
    throw DomainError("operator_weighted_ratio: delta must lie in [0, 3)");
  const Weight w = make_weight(delta, f.grid());
  const double den = weighted_lp_norm(f, p, w);
  if (den == 0.0) throw UndefinedRatio("operator_weighted_ratio: f vanishes");
  ScalarField out;
  switch (op) {
    case OperatorKind::riesz1: out = riesz(f, 0); break;
    case OperatorKind::riesz2: out = riesz(f, 1); break;
    case OperatorKind::riesz3: out = riesz(f, 2); break;
    case OperatorKind::maximal: out = maximal_function(f); break;
    case OperatorKind::convolve:
      if (!kernel) throw DomainError("operator_weighted_ratio: kernel required");
      out = mollify(f, *kernel);
      return weighted_lp_norm(out, p, w) / den / kernel->mass();
  }
  return weighted_lp_norm(out, p, w) / den;
}

}  // namespace mhdlab
