#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "mhdlab/errors.hpp"

namespace mhdlab {

/// Periodic box [0, L)^3 sampled with N points per axis.
class Grid {
 public:
  Grid() = default;
  Grid(int n, double length, double dealias_fraction = 2.0 / 3.0)
      : n_(n), length_(length), dealias_fraction_(dealias_fraction) {
    if (n < 8 || n % 2 != 0)
      throw DomainError("grid: n_per_axis must be even and >= 8");
    if (!(length > 0.0) || !std::isfinite(length))
      throw DomainError("grid: box_length must be positive");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
      throw DomainError("grid: dealias_fraction must lie in (0, 1]");
  }

  int n() const { return n_; }
  double length() const { return length_; }
  double dealias_fraction() const { return dealias_fraction_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  double spacing() const { return length_ / n_; }
  double cell_volume() const {
    const double h = spacing();
    return h * h * h;
  }
  double volume() const { return length_ * length_ * length_; }
  double wavenumber_unit() const { return 2.0 * std::numbers::pi / length_; }

  /// Signed mode number of array index i, in [-N/2, N/2).
  int mode(int i) const { return i < n_ / 2 ? i : i - n_; }
  /// Largest |m| retained by the dealiasing filter.
  int dealias_cutoff() const {
    return static_cast<int>(std::floor(dealias_fraction_ * n_ / 2.0));
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_) * k);
  }
  double coord(int i) const { return i * spacing(); }
  /// Index of the mode -m for the mode at index i.
  int conj_index(int i) const { return (n_ - i) % n_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_ &&
           a.dealias_fraction_ == b.dealias_fraction_;
  }

 private:
  int n_ = 0;
  double length_ = 0.0;
  double dealias_fraction_ = 2.0 / 3.0;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grid mismatch");
}

}  // namespace mhdlab
