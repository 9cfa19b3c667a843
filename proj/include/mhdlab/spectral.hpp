#pragma once

#include "mhdlab/field.hpp"

namespace mhdlab {

enum class DerivOp { d1, d2, d3, laplacian };

/// inverse(forward(f)); `deviation` receives max|f_out - f| / max|f|.
ScalarField transform_roundtrip(const ScalarField& f, double* deviation = nullptr);

/// Spectral derivative. First derivatives drop the Nyquist plane of their
/// axis; the Laplacian uses the full |k|^2.
ScalarField derivative(const ScalarField& f, DerivOp op);
ScalarField partial(const ScalarField& f, int axis);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& f);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// (div T)_j = sum_i d_i T_ij.
VectorField divergence(const TensorField& t);

/// Per-mode projection e -> e - (e.k)k/|k|^2; zero mode unchanged.
VectorField leray_project(const VectorField& v);

/// Multiplier i k_i/|k|, zero mode mapped to 0.
ScalarField riesz(const ScalarField& f, int axis);

/// sum_ij R_i R_j T_ij with multiplier -k_i k_j/|k|^2 (zero mode 0).
/// Off-diagonal pairs are combined as T_ij + T_ji before multiplication.
ScalarField riesz_riesz_contract(const TensorField& t);

/// Multiplier exp(-|k|^2 tau).
ScalarField heat_propagate(const ScalarField& f, double tau);
VectorField heat_propagate(const VectorField& f, double tau);

/// Zero coefficients with any |m_i| above the grid's dealias cutoff.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& f);
TensorField dealias(const TensorField& t);

/// Dealiased pointwise product.
ScalarField product(const ScalarField& a, const ScalarField& b);

/// Symmetric part (T + T^t)/2.
TensorField symmetrize(const TensorField& t);

// Discrete L2 quantities with midpoint quadrature and pairwise summation.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
/// Same norm evaluated by Plancherel: L^3 sum |c_m|^2.
double l2_norm_spectral(const ScalarField& f);
double l2_norm_spectral(const VectorField& f);
double max_abs(const ScalarField& f);
double max_abs(const VectorField& f);
double mean(const ScalarField& f);
/// sqrt(sum_i |d_i f|^2) over all components, in L2.
double gradient_l2_norm(const VectorField& f);

/// Largest |coefficient| of div v divided by (|k|_max L2 norm of v), or the
/// absolute value when v vanishes.
double relative_divergence(const VectorField& v);

/// Apply a real per-mode multiplier m(index) to every coefficient.
template <class M>
ScalarField apply_multiplier(const ScalarField& f, M&& m) {
  if (f.is_zero()) return ScalarField(f.grid());
  const Grid& g = f.grid();
  std::vector<cplx> c = f.spectral();
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) c[idx] *= m(i, j, k);
  return ScalarField::from_spectral(g, std::move(c));
}

}  // namespace mhdlab
