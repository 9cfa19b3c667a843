#pragma once

#include <string>

#include "mhdlab/field.hpp"

namespace mhdlab {

enum class KernelShape { gaussian_bump, polynomial_bump };

std::string to_string(KernelShape s);
KernelShape kernel_shape_from_string(const std::string& s);

/// Smallest kernel scale accepted on a grid (1.5 h).
double resolvability_threshold(const Grid& g);

/// Unnormalized radial profile theta(r / epsilon).
///   gaussian_bump:   exp(-(3 rho)^2 / 2) for rho <= 2, else 0 (sigma = eps/3)
///   polynomial_bump: (1 - rho^2)^4 for rho <= 1, else 0
double kernel_profile(KernelShape s, double rho);

/// Discrete mollifier at scale epsilon. Samples use minimal-image distances
/// and are normalized to unit discrete mass.
struct Kernel {
  KernelShape shape = KernelShape::gaussian_bump;
  double epsilon = 0.0;
  Grid grid;
  /// Normalized weights w_j (sum w_j = 1); density is w_j / h^3.
  std::vector<double> weights;
  /// Real Fourier multiplier sum_j w_j exp(-i k.x_j); equals 1 at k = 0.
  std::vector<double> multiplier;

  /// Density value theta_eps(0) = w_0 / h^3.
  double density_at_origin() const;
  /// Discrete mass sum_j theta_eps(x_j) h^3.
  double mass() const;
};

/// Throws UnderResolvedKernel when epsilon < 1.5 h.
Kernel make_kernel(KernelShape shape, double epsilon, const Grid& g);

ScalarField mollify(const ScalarField& f, const Kernel& k);
VectorField mollify(const VectorField& f, const Kernel& k);

/// Convolution with theta at scale epsilon * sqrt(t).
ScalarField mollify_time_scaled(const ScalarField& f, KernelShape shape,
                                double epsilon, double t);
VectorField mollify_time_scaled(const VectorField& f, KernelShape shape,
                                double epsilon, double t);

}  // namespace mhdlab
