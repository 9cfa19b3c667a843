#pragma once

#include <array>
#include <complex>
#include <vector>

#include "mhdlab/grid.hpp"

namespace mhdlab {

using cplx = std::complex<double>;

/// Real scalar samples on a Grid with a lazily synchronized spectral view.
///
/// A default-constructed field on a grid is known to be zero and holds no
/// storage until one of its views is requested. The spectral view uses the
/// normalized forward transform  c_m = N^-3 sum_x f(x) exp(-i k.x).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid_(g) {}

  static ScalarField from_physical(const Grid& g, std::vector<double> values);
  /// Coefficients are made Hermitian before being stored.
  static ScalarField from_spectral(const Grid& g, std::vector<cplx> coeffs);

  template <class F>
  static ScalarField sample(const Grid& g, F&& f) {
    std::vector<double> v(g.size());
    const int n = g.n();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          v[g.index(i, j, k)] = f(g.coord(i), g.coord(j), g.coord(k));
    return from_physical(g, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  bool is_zero() const { return zero_; }
  bool has_physical() const { return phys_ok_; }
  bool has_spectral() const { return spec_ok_; }

  const std::vector<double>& physical() const;
  const std::vector<cplx>& spectral() const;
  /// Mutable views invalidate the other representation.
  std::vector<double>& physical_mut();
  std::vector<cplx>& spectral_mut();

  /// Drop the spectral cache (keeps the physical samples).
  void compact();

 private:
  Grid grid_;
  mutable std::vector<double> phys_;
  mutable std::vector<cplx> spec_;
  mutable bool phys_ok_ = false;
  mutable bool spec_ok_ = false;
  bool zero_ = true;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& g) : c_{ScalarField(g), ScalarField(g), ScalarField(g)} {}
  VectorField(ScalarField a, ScalarField b, ScalarField c);

  ScalarField& operator[](int i) { return c_[i]; }
  const ScalarField& operator[](int i) const { return c_[i]; }
  const Grid& grid() const { return c_[0].grid(); }
  bool is_zero() const {
    return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero();
  }
  void compact() {
    for (auto& s : c_) s.compact();
  }

 private:
  std::array<ScalarField, 3> c_;
};

/// 3x3 field, entry (i, j) stored at 3*i + j.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const Grid& g);

  ScalarField& at(int i, int j) { return e_[3 * i + j]; }
  const ScalarField& at(int i, int j) const { return e_[3 * i + j]; }
  const Grid& grid() const { return e_[0].grid(); }
  bool is_zero() const;
  void compact() {
    for (auto& s : e_) s.compact();
  }

 private:
  std::array<ScalarField, 9> e_;
};

// Linear combinations. Spectral arithmetic is used when both operands already
// hold a spectral view, physical arithmetic otherwise.
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
TensorField operator+(const TensorField& a, const TensorField& b);
TensorField operator*(double s, const TensorField& a);

/// Pointwise product of samples (no dealiasing).
ScalarField pointwise(const ScalarField& a, const ScalarField& b);

bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& f);

}  // namespace mhdlab
