#include <cmath>
#include <random>

#include "mhdlab/dss.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/io.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/weights.hpp"

namespace mhdlab {

void SimState::compact() {
  u.compact();
  b.compact();
  v.compact();
  c.compact();
  p.compact();
  q.compact();
  F.compact();
  G.compact();
}

ForcingSpec ForcingSpec::rescaled(double lambda) const {
  if (is_zero()) return *this;
  ForcingSpec out = *this;
  const Fn base = fn;
  const double l2 = lambda * lambda;
  out.fn = [base, lambda, l2](double t, const Point& x) {
    auto v = base(l2 * t, {lambda * x[0], lambda * x[1], lambda * x[2]});
    for (auto& e : v) e *= l2;
    return v;
  };
  out.description = description + " rescaled";
  return out;
}

ForcingSpec ForcingSpec::rotated() const {
  if (is_zero()) return *this;
  ForcingSpec out = *this;
  const Fn base = fn;
  // Q e_x = e_y: (Q y)_a = y_{a-1}; F'(x) = Q F(Q^T x) Q^T
  out.fn = [base](double t, const Point& x) {
    const auto f = base(t, {x[1], x[2], x[0]});
    std::array<double, 9> r{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) r[3 * a + b] = f[3 * ((a + 2) % 3) + (b + 2) % 3];
    return r;
  };
  out.description = description + " rotated";
  return out;
}

TensorField sample_forcing(const ForcingSpec& spec, const Grid& g, double t) {
  TensorField out(g);
  if (spec.is_zero()) return out;
  std::array<std::vector<double>, 9> e;
  for (auto& v : e) v.resize(g.size());
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto f = spec.fn(t, {g.coord(i), g.coord(j), g.coord(k)});
        const std::size_t idx = g.index(i, j, k);
        for (int a = 0; a < 9; ++a) e[a][idx] = f[a];
      }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      out.at(a, b) = dealias(ScalarField::from_physical(g, std::move(e[3 * a + b])));
  return out;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

VectorField finish(const VectorField& v) { return dealias(leray_project(v)); }

// curl(G e) = grad G x e for a Gaussian G of width w centered at c.
VectorField gaussian_curl(const Grid& g, const Point& c, double w, const Point& e,
                          double amp) {
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.resize(g.size());
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double dx = g.coord(i) - c[0], dy = g.coord(j) - c[1], dz = g.coord(k) - c[2];
        const double G = std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * w * w));
        const double s = -amp * G / w;
        const double gx = s * dx, gy = s * dy, gz = s * dz;
        const std::size_t idx = g.index(i, j, k);
        out[0][idx] = gy * e[2] - gz * e[1];
        out[1][idx] = gz * e[0] - gx * e[2];
        out[2][idx] = gx * e[1] - gy * e[0];
      }
  return VectorField(ScalarField::from_physical(g, std::move(out[0])),
                     ScalarField::from_physical(g, std::move(out[1])),
                     ScalarField::from_physical(g, std::move(out[2])));
}

VectorField random_field(const Grid& g, int modes, double amp, std::mt19937_64& rng) {
  const int n = g.n();
  const int cut = std::min(modes, g.dealias_cutoff());
  VectorField out(g);
  for (int a = 0; a < 3; ++a) {
    std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const int mx = g.mode(i), my = g.mode(j), mz = g.mode(k);
          if (std::abs(mx) > cut || std::abs(my) > cut || std::abs(mz) > cut) continue;
          const double re = 2.0 * uniform01(rng) - 1.0;
          const double im = 2.0 * uniform01(rng) - 1.0;
          const double m2 = mx * mx + my * my + mz * mz;
          c[g.index(i, j, k)] = cplx(re, im) / (1.0 + m2);
        }
    c[0] = 0.0;
    out[a] = ScalarField::from_spectral(g, std::move(c));
  }
  VectorField v = finish(out);
  const double rms = l2_norm(v) / std::sqrt(g.volume());
  return rms > 0.0 ? (amp / rms) * v : v;
}

}  // namespace

FieldPair make_initial(const InitialSpec& spec, const Grid& g, std::uint64_t seed) {
  const double L = g.length();
  const double s = g.wavenumber_unit();
  const double A = spec.amplitude;
  if (spec.type == "zero") return {VectorField(g), VectorField(g)};
  if (spec.type == "localized") {
    const double c = 0.5 * L;
    const double w = spec.width * L;
    VectorField u = gaussian_curl(g, {c, c, c}, w, {1.0, 0.5, 0.25}, A);
    VectorField b = gaussian_curl(g, {c + 0.05 * L, c, c - 0.03 * L}, w, {-0.3, 1.0, 0.6}, A);
    return {finish(u), finish(b)};
  }
  if (spec.type == "orszag_tang") {
    auto comp = [&](auto f) { return ScalarField::sample(g, f); };
    VectorField u(comp([&](double, double y, double) { return -A * std::sin(s * y); }),
                  comp([&](double x, double, double) { return A * std::sin(s * x); }),
                  comp([&](double x, double y, double) { return 0.2 * A * std::sin(s * (x + y)); }));
    VectorField b(comp([&](double, double y, double z) { return -A * std::sin(s * y) + 0.1 * A * std::cos(s * z); }),
                  comp([&](double x, double, double) { return A * std::sin(2.0 * s * x); }),
                  comp([&](double x, double, double z) { return 0.2 * A * std::cos(s * (x + z)); }));
    return {finish(u), finish(b)};
  }
  if (spec.type == "shear") {
    VectorField u(ScalarField::sample(g, [&](double, double y, double) { return A * std::sin(s * y); }),
                  ScalarField(g), ScalarField(g));
    return {finish(u), VectorField(g)};
  }
  if (spec.type == "random") {
    std::mt19937_64 rng(seed);
    VectorField u = random_field(g, spec.modes, A, rng);
    VectorField b = random_field(g, spec.modes, A, rng);
    return {u, b};
  }
  if (spec.type == "dss") {
    const DssGenerator gen;
    const double c = 0.5 * L;
    const Cutoff cut = make_cutoff(spec.dss_radius * L, g);
    const double core = 2.0 * g.spacing();
    std::array<std::vector<double>, 3> out;
    for (auto& v : out) v.resize(g.size());
    const int n = g.n();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const Point x{g.coord(i) - c, g.coord(j) - c, g.coord(k) - c};
          const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
          if (r < core) continue;
          const Point v = dss_value(gen, x);
          const double phi = cut.value({g.coord(i), g.coord(j), g.coord(k)});
          for (int a = 0; a < 3; ++a) out[a][g.index(i, j, k)] = A * phi * v[a];
        }
    VectorField u(ScalarField::from_physical(g, std::move(out[0])),
                  ScalarField::from_physical(g, std::move(out[1])),
                  ScalarField::from_physical(g, std::move(out[2])));
    return {finish(u), VectorField(g)};
  }
  if (spec.type == "snapshot") {
    SimState st = read_snapshot(spec.path);
    require_same_grid(st.u.grid(), g, "snapshot initial data");
    return {st.u, st.b};
  }
  throw DomainError("unknown initial data type: " + spec.type);
}

}  // namespace mhdlab
