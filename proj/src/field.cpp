#include "mhdlab/field.hpp"

#include <cmath>

#include "mhdlab/fft.hpp"

namespace mhdlab {

ScalarField ScalarField::from_physical(const Grid& g, std::vector<double> values) {
  if (values.size() != g.size())
    throw GridMismatch("from_physical: sample count does not match grid");
  ScalarField f(g);
  f.phys_ = std::move(values);
  f.phys_ok_ = true;
  f.zero_ = false;
  return f;
}

ScalarField ScalarField::from_spectral(const Grid& g, std::vector<cplx> coeffs) {
  if (coeffs.size() != g.size())
    throw GridMismatch("from_spectral: coefficient count does not match grid");
  fft::make_hermitian(g.n(), coeffs.data());
  ScalarField f(g);
  f.spec_ = std::move(coeffs);
  f.spec_ok_ = true;
  f.zero_ = false;
  return f;
}

const std::vector<double>& ScalarField::physical() const {
  if (phys_ok_) return phys_;
  phys_.assign(grid_.size(), 0.0);
  if (spec_ok_) fft::inverse(grid_.n(), spec_.data(), phys_.data());
  phys_ok_ = true;
  return phys_;
}

const std::vector<cplx>& ScalarField::spectral() const {
  if (spec_ok_) return spec_;
  spec_.assign(grid_.size(), cplx(0.0, 0.0));
  if (phys_ok_) fft::forward(grid_.n(), phys_.data(), spec_.data());
  spec_ok_ = true;
  return spec_;
}

std::vector<double>& ScalarField::physical_mut() {
  physical();
  spec_ok_ = false;
  spec_.clear();
  spec_.shrink_to_fit();
  zero_ = false;
  return phys_;
}

std::vector<cplx>& ScalarField::spectral_mut() {
  spectral();
  phys_ok_ = false;
  phys_.clear();
  phys_.shrink_to_fit();
  zero_ = false;
  return spec_;
}

void ScalarField::compact() {
  if (zero_) {
    phys_.clear();
    phys_.shrink_to_fit();
    spec_.clear();
    spec_.shrink_to_fit();
    phys_ok_ = spec_ok_ = false;
    return;
  }
  physical();
  spec_.clear();
  spec_.shrink_to_fit();
  spec_ok_ = false;
}

VectorField::VectorField(ScalarField a, ScalarField b, ScalarField c)
    : c_{std::move(a), std::move(b), std::move(c)} {
  require_same_grid(c_[0].grid(), c_[1].grid(), "VectorField");
  require_same_grid(c_[0].grid(), c_[2].grid(), "VectorField");
}

TensorField::TensorField(const Grid& g) {
  for (auto& e : e_) e = ScalarField(g);
}

bool TensorField::is_zero() const {
  for (const auto& e : e_)
    if (!e.is_zero()) return false;
  return true;
}

namespace {

template <class Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op) {
  require_same_grid(a.grid(), b.grid(), "field arithmetic");
  const Grid& g = a.grid();
  if (a.is_zero() && b.is_zero()) return ScalarField(g);
  if (a.has_spectral() && b.has_spectral()) {
    const auto& x = a.spectral();
    const auto& y = b.spectral();
    std::vector<cplx> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(x[i], y[i]);
    return ScalarField::from_spectral(g, std::move(out));
  }
  const auto& x = a.physical();
  const auto& y = b.physical();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(x[i], y[i]);
  return ScalarField::from_physical(g, std::move(out));
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](auto x, auto y) { return x + y; });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](auto x, auto y) { return x - y; });
}

ScalarField operator*(double s, const ScalarField& a) {
  const Grid& g = a.grid();
  if (a.is_zero()) return ScalarField(g);
  if (a.has_spectral()) {
    std::vector<cplx> out = a.spectral();
    for (auto& v : out) v *= s;
    return ScalarField::from_spectral(g, std::move(out));
  }
  std::vector<double> out = a.physical();
  for (auto& v : out) v *= s;
  return ScalarField::from_physical(g, std::move(out));
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  return VectorField(a[0] + b[0], a[1] + b[1], a[2] + b[2]);
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  return VectorField(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

VectorField operator*(double s, const VectorField& a) {
  return VectorField(s * a[0], s * a[1], s * a[2]);
}

TensorField operator+(const TensorField& a, const TensorField& b) {
  TensorField t(a.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.at(i, j) = a.at(i, j) + b.at(i, j);
  return t;
}

TensorField operator*(double s, const TensorField& a) {
  TensorField t(a.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.at(i, j) = s * a.at(i, j);
  return t;
}

ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise");
  if (a.is_zero() || b.is_zero()) return ScalarField(a.grid());
  const auto& x = a.physical();
  const auto& y = b.physical();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return ScalarField::from_physical(a.grid(), std::move(out));
}

bool all_finite(const ScalarField& f) {
  if (f.is_zero()) return true;
  if (f.has_spectral()) {
    for (const auto& c : f.spectral())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }
  for (double v : f.physical())
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const VectorField& f) {
  return all_finite(f[0]) && all_finite(f[1]) && all_finite(f[2]);
}

}  // namespace mhdlab
