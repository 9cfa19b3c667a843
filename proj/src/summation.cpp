#include "mhdlab/summation.hpp"

#include <algorithm>
#include <cmath>

namespace mhdlab {

std::vector<double> time_weights(std::size_t n) {
  std::vector<double> w(n + 1, 1.0);
  switch (n) {
    case 0: return {0.0};
    case 1: return {0.5, 0.5};
    case 2: return {1.0 / 3, 4.0 / 3, 1.0 / 3};
    case 3: return {3.0 / 8, 9.0 / 8, 9.0 / 8, 3.0 / 8};
    case 4: return {1.0 / 3, 4.0 / 3, 2.0 / 3, 4.0 / 3, 1.0 / 3};
    default: break;
  }
  const double end[3] = {3.0 / 8, 7.0 / 6, 23.0 / 24};
  for (int i = 0; i < 3; ++i) {
    w[i] = end[i];
    w[n - i] = end[i];
  }
  return w;
}

double integrate_uniform(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  const auto w = time_weights(y.size() - 1);
  return h * pairwise_sum(y.size(), [&](std::size_t i) { return w[i] * y[i]; });
}

std::vector<double> interval_integrals(const std::vector<double>& t,
                                       const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> out;
  if (n < 2) return out;
  const std::size_t q = std::min<std::size_t>(4, n);
  // two-point Gauss-Legendre is exact for the cubic on each interval
  const double g = 0.5 / std::sqrt(3.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t s = i > 0 ? i - 1 : 0;
    s = std::min(s, n - q);
    const double a = t[i], b = t[i + 1], mid = 0.5 * (a + b), len = b - a;
    double acc = 0.0;
    for (double xi : {mid - g * len, mid + g * len}) {
      double v = 0.0;
      for (std::size_t j = s; j < s + q; ++j) {
        double L = 1.0;
        for (std::size_t l = s; l < s + q; ++l)
          if (l != j) L *= (xi - t[l]) / (t[j] - t[l]);
        v += L * y[j];
      }
      acc += 0.5 * len * v;
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace mhdlab
