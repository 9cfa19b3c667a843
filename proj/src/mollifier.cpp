#include "mhdlab/mollifier.hpp"
#include "mhdlab/spectral.hpp"

#include <cmath>

#include "mhdlab/fft.hpp"
#include "mhdlab/summation.hpp"

namespace mhdlab {

std::string to_string(KernelShape s) {
  return s == KernelShape::gaussian_bump ? "gaussian_bump" : "polynomial_bump";
}

KernelShape kernel_shape_from_string(const std::string& s) {
  if (s == "gaussian_bump") return KernelShape::gaussian_bump;
  if (s == "polynomial_bump") return KernelShape::polynomial_bump;
  throw DomainError("unknown kernel shape: " + s);
}

double resolvability_threshold(const Grid& g) { return 1.5 * g.spacing(); }

double kernel_profile(KernelShape s, double rho) {
  if (s == KernelShape::gaussian_bump) {
    if (rho > 2.0) return 0.0;
    const double z = 3.0 * rho;
    return std::exp(-0.5 * z * z);
  }
  if (rho >= 1.0) return 0.0;
  const double a = 1.0 - rho * rho;
  return (a * a) * (a * a);
}

double Kernel::density_at_origin() const { return weights[0] / grid.cell_volume(); }

double Kernel::mass() const { return pairwise_sum(weights); }

Kernel make_kernel(KernelShape shape, double epsilon, const Grid& g) {
  if (!(epsilon > 0.0)) throw DomainError("make_kernel: epsilon must be positive");
  if (epsilon < resolvability_threshold(g))
    throw UnderResolvedKernel("make_kernel: epsilon " + std::to_string(epsilon) +
                              " is below 1.5 h = " +
                              std::to_string(resolvability_threshold(g)));
  Kernel k;
  k.shape = shape;
  k.epsilon = epsilon;
  k.grid = g;
  const int n = g.n();
  const double h = g.spacing();
  std::vector<double> w(g.size());
  std::size_t idx = 0;
  for (int c = 0; c < n; ++c) {
    const double z = std::min(c, n - c) * h;
    for (int b = 0; b < n; ++b) {
      const double y = std::min(b, n - b) * h;
      for (int a = 0; a < n; ++a, ++idx) {
        const double x = std::min(a, n - a) * h;
        w[idx] = kernel_profile(shape, std::sqrt(x * x + y * y + z * z) / epsilon);
      }
    }
  }
  const double total = pairwise_sum(w);
  for (auto& v : w) v /= total;
  k.weights = w;

  std::vector<cplx> c(g.size());
  fft::forward(n, w.data(), c.data());
  const double scale = static_cast<double>(g.size());
  k.multiplier.resize(g.size());
  for (std::size_t i = 0; i < c.size(); ++i) k.multiplier[i] = c[i].real() * scale;
  k.multiplier[0] = 1.0;
  return k;
}

ScalarField mollify(const ScalarField& f, const Kernel& k) {
  require_same_grid(f.grid(), k.grid, "mollify");
  const Grid& g = f.grid();
  const int n = g.n();
  return apply_multiplier(f, [&](int i, int j, int l) {
    return k.multiplier[static_cast<std::size_t>(i) +
                        static_cast<std::size_t>(n) * (j + static_cast<std::size_t>(n) * l)];
  });
}

VectorField mollify(const VectorField& f, const Kernel& k) {
  return VectorField(mollify(f[0], k), mollify(f[1], k), mollify(f[2], k));
}

ScalarField mollify_time_scaled(const ScalarField& f, KernelShape shape,
                                double epsilon, double t) {
  if (!(t > 0.0)) throw DomainError("mollify_time_scaled: t must be positive");
  return mollify(f, make_kernel(shape, epsilon * std::sqrt(t), f.grid()));
}

VectorField mollify_time_scaled(const VectorField& f, KernelShape shape,
                                double epsilon, double t) {
  if (!(t > 0.0)) throw DomainError("mollify_time_scaled: t must be positive");
  return mollify(f, make_kernel(shape, epsilon * std::sqrt(t), f.grid()));
}

}  // namespace mhdlab
