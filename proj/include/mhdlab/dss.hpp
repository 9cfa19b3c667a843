#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "mhdlab/dual.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// Generator supported in the annulus 1 < |x| < lambda:
///   g = a chi(r) (-y, x, 0) + b curl(chi(r) (-y, x, 0)),
/// chi a C-infinity bump on (1 + d, lambda - d), d = (lambda - 1) / 10.
struct DssGenerator {
  double lambda = 2.0;
  double swirl = 1.0;
  double poloidal = 0.5;
  bool has_forcing = false;
  double forcing_amplitude = 1.0;

  double inner_radius() const { return 1.0 + 0.1 * (lambda - 1.0); }
  double outer_radius() const { return lambda - 0.1 * (lambda - 1.0); }

  template <class T>
  void bump(T r, T& chi, T& dchi) const {
    using std::exp;
    const double a = inner_radius(), b = outer_radius();
    if (value_of(r) <= a || value_of(r) >= b) {
      chi = T(0.0);
      dchi = T(0.0);
      return;
    }
    const T s = (T(2.0) * r - T(a + b)) / T(b - a);
    const T den = T(1.0) - s * s;
    chi = exp(T(1.0) - T(1.0) / den);
    // d/dr exp(1 - 1/(1 - s^2)) = chi * (-2 s / (1 - s^2)^2) * ds/dr
    dchi = chi * (T(-2.0) * s / (den * den)) * T(2.0 / (b - a));
  }

  template <class T>
  std::array<T, 3> value(T x, T y, T z) const {
    using std::sqrt;
    const T r = sqrt(x * x + y * y + z * z);
    T chi, dchi;
    bump(r, chi, dchi);
    if (value_of(chi) == 0.0 && value_of(dchi) == 0.0) return {T(0.0), T(0.0), T(0.0)};
    const T q = dchi / r;
    const T cx = -(q * z * x);
    const T cy = -(q * z * y);
    const T cz = T(2.0) * chi + q * (x * x + y * y);
    return {T(swirl) * (-(chi * y)) + T(poloidal) * cx,
            T(swirl) * (chi * x) + T(poloidal) * cy, T(poloidal) * cz};
  }

  Point g(const Point& x) const {
    const auto v = value(x[0], x[1], x[2]);
    return {v[0], v[1], v[2]};
  }

  /// div g by forward-mode differentiation.
  double divergence(const Point& x) const;

  /// Tensor profile A(x) on the annulus, entry (i, j) at 3*i + j.
  std::array<double, 9> g_F(const Point& x) const;
  /// Log-periodic time profile 1 + sin(2 pi log_{lambda^2} s) / 2.
  double time_profile(double s) const;
};

/// floor(log_lambda r), exact for lambda = 2.
int shell_index(double lambda, double r);

/// lambda^{-n} g(lambda^{-n} x) with n = shell_index(|x|). Throws at x = 0.
Point dss_value(const DssGenerator& gen, const Point& x);
/// lambda^{-2n} A(lambda^{-n} x) tau(lambda^{-2n} t). Requires t > 0 and
/// a generator with forcing.
std::array<double, 9> dss_forcing_value(const DssGenerator& gen, double t, const Point& x);

/// Cubic lattice of (2M+1)^3 points x = h (i, j, k), |i|,|j|,|k| <= M,
/// h = half_width / M; points with |x| < r_core are excluded.
struct DssSampling {
  int half_points = 32;
  double half_width = 4.0;
  double r_core = -1.0;  // negative: 2 h
};

class DssField {
 public:
  using Fn = std::function<Point(const Point&)>;

  /// Samples f at every resolved lattice point; keeps f for off-lattice use.
  static DssField from_function(double lambda, const DssSampling& s, Fn f);

  double lambda() const { return lambda_; }
  int half_points() const { return m_; }
  double spacing() const { return h_; }
  double half_width() const { return h_ * m_; }
  double r_core() const { return r_core_; }
  const Fn& evaluator() const { return fn_; }

  bool resolved(int i, int j, int k) const;
  Point at(int i, int j, int k) const;
  /// Lattice lookup when x is a lattice point, tricubic Lagrange
  /// interpolation otherwise. Throws when the stencil leaves the box.
  Point eval(const Point& x, bool* interpolated = nullptr) const;
  double scale() const;
  /// Flat sample arrays (component-major), x fastest; masked points are 0.
  const std::array<std::vector<double>, 3>& samples() const { return data_; }

 private:
  std::size_t idx(int i, int j, int k) const {
    const int n = 2 * m_ + 1;
    return static_cast<std::size_t>(i + m_) +
           static_cast<std::size_t>(n) * ((j + m_) + static_cast<std::size_t>(n) * (k + m_));
  }
  double lambda_ = 2.0;
  int m_ = 0;
  double h_ = 1.0;
  double r_core_ = 0.0;
  std::array<std::vector<double>, 3> data_;
  std::vector<unsigned char> mask_;
  Fn fn_;
};

DssField dss_extend(const DssGenerator& gen, const DssSampling& s);

/// Resolved lattice points x with lambda x also a resolved lattice point.
std::vector<Point> dyadic_sample_points(const DssField& u);

/// max |lambda u(lambda x) - u(x)| over the samples.
double dss_residual(const DssField& u, const std::vector<Point>& samples,
                    bool* interpolated = nullptr);

/// Integral of |f|^2 w_gamma over r0 <= |x| < r1 (weight centered at 0) by
/// Gauss-Legendre in r and cos(theta) and the trapezoid rule in phi.
double shell_integral(const DssField::Fn& f, double gamma, double r0, double r1);

struct ShellStudy {
  double gamma = 0.0;
  std::vector<double> radii;
  std::vector<double> norms;       // ||u||_{L2_w} over r_core < |x| < R
  std::vector<double> increments;  // squared-norm increments between radii
  std::vector<double> ratios;      // successive increment ratios
  double expected_ratio = 0.0;     // lambda^{1 - gamma}
  bool converges = false;          // every ratio < 1
};

/// Weighted L2 norms over balls of radius R for each gamma.
std::vector<ShellStudy> dss_weighted_norm_study(const DssField& u,
                                                const std::vector<double>& gammas,
                                                const std::vector<double>& radii);

/// Forcing tensor centered in the box: DSS profile times the cutoff of
/// radius `cutoff_radius`, zero inside 2h, dealiased.
TensorField dss_forcing(const DssGenerator& gen, double t, const Grid& g,
                        double cutoff_radius);

struct ScalingReport {
  double lambda = 2.0;
  std::vector<double> times;
  std::vector<double> rel_diff;  // per output time
  double max_rel_diff = 0.0;
};

/// Runs the configuration on [0, L)^3 and the rescaled problem on
/// [0, L/lambda)^3 (data lambda u0(lambda x), forcing lambda^2 F(lambda^2 t,
/// lambda x), dt / lambda^2, eps / lambda for the fixed kernel) and compares
/// lambda u(lambda^2 t, lambda x) with the companion solution.
ScalingReport scaling_covariance_check(const SimConfig& cfg, double lambda,
                                       bool rotate = false);

/// Cyclic axis permutation R u(x) = Q u(Q^T x), Q e_x = e_y.
VectorField rotate_axes(const VectorField& u);

}  // namespace mhdlab
