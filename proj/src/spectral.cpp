#include "mhdlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "mhdlab/summation.hpp"

namespace mhdlab {
namespace {

// Wavenumber used by odd operators: the Nyquist index carries k = 0.
double odd_k(const Grid& g, int idx) {
  if (idx == g.n() / 2) return 0.0;
  return g.mode(idx) * g.wavenumber_unit();
}

double full_k(const Grid& g, int idx) { return g.mode(idx) * g.wavenumber_unit(); }

ScalarField from_coeffs(const Grid& g, std::vector<cplx> c) {
  return ScalarField::from_spectral(g, std::move(c));
}

}  // namespace

ScalarField transform_roundtrip(const ScalarField& f, double* deviation) {
  const Grid& g = f.grid();
  std::vector<cplx> c = f.spectral();
  ScalarField out = from_coeffs(g, std::move(c));
  const auto& a = f.physical();
  const auto& b = out.physical();
  if (deviation) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num = std::max(num, std::abs(a[i] - b[i]));
      den = std::max(den, std::abs(a[i]));
    }
    *deviation = den > 0.0 ? num / den : num;
  }
  out.compact();
  return out;
}

ScalarField partial(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  if (f.is_zero()) return ScalarField(g);
  std::vector<cplx> c = f.spectral();
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        const int a = axis == 0 ? i : (axis == 1 ? j : k);
        c[idx] *= cplx(0.0, odd_k(g, a));
      }
  return from_coeffs(g, std::move(c));
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  return apply_multiplier(f, [&g](int i, int j, int k) {
    const double kx = full_k(g, i), ky = full_k(g, j), kz = full_k(g, k);
    return -(kx * kx + ky * ky + kz * kz);
  });
}

VectorField laplacian(const VectorField& f) {
  return VectorField(laplacian(f[0]), laplacian(f[1]), laplacian(f[2]));
}

ScalarField derivative(const ScalarField& f, DerivOp op) {
  switch (op) {
    case DerivOp::d1: return partial(f, 0);
    case DerivOp::d2: return partial(f, 1);
    case DerivOp::d3: return partial(f, 2);
    case DerivOp::laplacian: return laplacian(f);
  }
  return laplacian(f);
}

VectorField gradient(const ScalarField& f) {
  return VectorField(partial(f, 0), partial(f, 1), partial(f, 2));
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  if (v.is_zero()) return ScalarField(g);
  const auto& a = v[0].spectral();
  const auto& b = v[1].spectral();
  const auto& c = v[2].spectral();
  std::vector<cplx> out(g.size());
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx)
        out[idx] = cplx(0.0, 1.0) *
                   (odd_k(g, i) * a[idx] + odd_k(g, j) * b[idx] + odd_k(g, k) * c[idx]);
  return from_coeffs(g, std::move(out));
}

VectorField divergence(const TensorField& t) {
  const Grid& g = t.grid();
  VectorField out(g);
  for (int j = 0; j < 3; ++j) {
    VectorField col(t.at(0, j), t.at(1, j), t.at(2, j));
    out[j] = divergence(col);
  }
  return out;
}

VectorField leray_project(const VectorField& v) {
  const Grid& g = v.grid();
  if (v.is_zero()) return VectorField(g);
  std::vector<cplx> a = v[0].spectral();
  std::vector<cplx> b = v[1].spectral();
  std::vector<cplx> c = v[2].spectral();
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k) {
    const double kz = odd_k(g, k);
    for (int j = 0; j < n; ++j) {
      const double ky = odd_k(g, j);
      for (int i = 0; i < n; ++i, ++idx) {
        const double kx = odd_k(g, i);
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        const cplx dot = (kx * a[idx] + ky * b[idx] + kz * c[idx]) / k2;
        a[idx] -= kx * dot;
        b[idx] -= ky * dot;
        c[idx] -= kz * dot;
      }
    }
  }
  return VectorField(from_coeffs(g, std::move(a)), from_coeffs(g, std::move(b)),
                     from_coeffs(g, std::move(c)));
}

ScalarField riesz(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  if (f.is_zero()) return ScalarField(g);
  std::vector<cplx> c = f.spectral();
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        const double kv[3] = {odd_k(g, i), odd_k(g, j), odd_k(g, k)};
        const double kk = std::sqrt(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
        c[idx] *= kk == 0.0 ? cplx(0.0, 0.0) : cplx(0.0, kv[axis] / kk);
      }
  return from_coeffs(g, std::move(c));
}

ScalarField riesz_riesz_contract(const TensorField& t) {
  const Grid& g = t.grid();
  if (t.is_zero()) return ScalarField(g);
  auto coeffs = [&](int i, int j) -> const std::vector<cplx>* {
    const ScalarField& s = t.at(i, j);
    return s.is_zero() ? nullptr : &s.spectral();
  };
  const std::vector<cplx>* e[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e[i][j] = coeffs(i, j);
  auto val = [&](int i, int j, std::size_t idx) {
    return e[i][j] ? (*e[i][j])[idx] : cplx(0.0, 0.0);
  };
  std::vector<cplx> out(g.size());
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        const double kv[3] = {odd_k(g, i), odd_k(g, j), odd_k(g, k)};
        const double k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
        if (k2 == 0.0) continue;
        cplx s = kv[0] * kv[0] * val(0, 0, idx) + kv[1] * kv[1] * val(1, 1, idx) +
                 kv[2] * kv[2] * val(2, 2, idx);
        s += kv[0] * kv[1] * (val(0, 1, idx) + val(1, 0, idx));
        s += kv[0] * kv[2] * (val(0, 2, idx) + val(2, 0, idx));
        s += kv[1] * kv[2] * (val(1, 2, idx) + val(2, 1, idx));
        out[idx] = -s / k2;
      }
  return from_coeffs(g, std::move(out));
}

ScalarField heat_propagate(const ScalarField& f, double tau) {
  if (tau < 0.0) throw DomainError("heat_propagate: tau must be >= 0");
  if (tau == 0.0) return f;
  const Grid& g = f.grid();
  return apply_multiplier(f, [&g, tau](int i, int j, int k) {
    const double kx = full_k(g, i), ky = full_k(g, j), kz = full_k(g, k);
    return std::exp(-(kx * kx + ky * ky + kz * kz) * tau);
  });
}

VectorField heat_propagate(const VectorField& f, double tau) {
  return VectorField(heat_propagate(f[0], tau), heat_propagate(f[1], tau),
                     heat_propagate(f[2], tau));
}

ScalarField dealias(const ScalarField& f) {
  const Grid& g = f.grid();
  const int cut = g.dealias_cutoff();
  return apply_multiplier(f, [&g, cut](int i, int j, int k) {
    return (std::abs(g.mode(i)) > cut || std::abs(g.mode(j)) > cut ||
            std::abs(g.mode(k)) > cut)
               ? 0.0
               : 1.0;
  });
}

VectorField dealias(const VectorField& f) {
  return VectorField(dealias(f[0]), dealias(f[1]), dealias(f[2]));
}

TensorField dealias(const TensorField& t) {
  TensorField out(t.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.at(i, j) = dealias(t.at(i, j));
  return out;
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  return dealias(pointwise(a, b));
}

TensorField symmetrize(const TensorField& t) {
  TensorField out(t.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.at(i, j) = 0.5 * (t.at(i, j) + t.at(j, i));
  return out;
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  if (a.is_zero() || b.is_zero()) return 0.0;
  const auto& x = a.physical();
  const auto& y = b.physical();
  return a.grid().cell_volume() *
         pairwise_sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

double inner(const VectorField& a, const VectorField& b) {
  return inner(a[0], b[0]) + inner(a[1], b[1]) + inner(a[2], b[2]);
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double l2_norm(const VectorField& f) { return std::sqrt(inner(f, f)); }

namespace {
double spectral_sq(const ScalarField& f) {
  if (f.is_zero()) return 0.0;
  const auto& c = f.spectral();
  return f.grid().volume() *
         pairwise_sum(c.size(), [&](std::size_t i) { return std::norm(c[i]); });
}
}  // namespace

double l2_norm_spectral(const ScalarField& f) { return std::sqrt(spectral_sq(f)); }

double l2_norm_spectral(const VectorField& f) {
  return std::sqrt(spectral_sq(f[0]) + spectral_sq(f[1]) + spectral_sq(f[2]));
}

double max_abs(const ScalarField& f) {
  if (f.is_zero()) return 0.0;
  double m = 0.0;
  for (double v : f.physical()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const VectorField& f) {
  if (f.is_zero()) return 0.0;
  const auto& a = f[0].physical();
  const auto& b = f[1].physical();
  const auto& c = f[2].physical();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]));
  return m;
}

double mean(const ScalarField& f) {
  if (f.is_zero()) return 0.0;
  const auto& x = f.physical();
  return pairwise_sum(x) / static_cast<double>(x.size());
}

double gradient_l2_norm(const VectorField& f) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a) {
      const ScalarField d = partial(f[c], a);
      s += inner(d, d);
    }
  return std::sqrt(s);
}

double relative_divergence(const VectorField& v) {
  const double d = l2_norm_spectral(divergence(v));
  const double scale = gradient_l2_norm(v);
  return scale > 0.0 ? d / scale : d;
}

}  // namespace mhdlab
