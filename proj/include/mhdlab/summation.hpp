#pragma once

#include <cstddef>
#include <vector>

namespace mhdlab {

/// Pairwise sum of f(0..n-1) with a fixed split order.
template <class F>
double pairwise_sum(std::size_t n, F&& f) {
  constexpr std::size_t block = 64;
  if (n <= block) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(i);
    return s;
  }
  struct Rec {
    F& f;
    double operator()(std::size_t lo, std::size_t hi) const {
      if (hi - lo <= block) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
      }
      const std::size_t mid = lo + (hi - lo) / 2;
      return (*this)(lo, mid) + (*this)(mid, hi);
    }
  };
  return Rec{f}(0, n);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

/// Quadrature weights (in units of the spacing) for n+1 equispaced samples:
/// Gregory end corrections (exact for cubics) when n >= 5, Newton-Cotes
/// combinations below that.
std::vector<double> time_weights(std::size_t n);

/// Integral of equispaced samples y with spacing h.
double integrate_uniform(const std::vector<double>& y, double h);

/// Integrals over each [t_i, t_{i+1}] of the cubic through the four nearest
/// samples (fewer when the series is shorter). Times must increase.
std::vector<double> interval_integrals(const std::vector<double>& t,
                                       const std::vector<double>& y);

}  // namespace mhdlab
