#pragma once

#include <array>
#include <vector>

#include "mhdlab/field.hpp"
#include "mhdlab/mollifier.hpp"

namespace mhdlab {

using Point = std::array<double, 3>;

/// w(x) = (1 + s)^-gamma with s = |x - center|, or sqrt(reg^2 + |x - center|^2)
/// when reg_epsilon > 0. Distances are not periodized.
struct Weight {
  double gamma = 0.0;
  double reg_epsilon = 0.0;
  Point center{0.0, 0.0, 0.0};

  double value(const Point& x) const;
  /// Analytic gradient; zero at the center for the unregularized weight.
  Point gradient(const Point& x) const;
};

/// Weight centered at the middle of the box. gamma must lie in [0, 3).
Weight make_weight(double gamma, const Grid& g, double reg_epsilon = 0.0);

ScalarField weight_field(const Weight& w, const Grid& g);
VectorField weight_gradient_field(const Weight& w, const Grid& g);

/// (sum |f|^p w h^3)^(1/p); |f| is the Euclidean norm for vector fields.
double weighted_lp_norm(const ScalarField& f, double p, const Weight& w);
double weighted_lp_norm(const VectorField& f, double p, const Weight& w);

/// Smooth step S(x) = e(x) / (e(x) + e(1 - x)), e(x) = exp(-1/x) for x > 0.
double smooth_step(double x);
double smooth_step_derivative(double x);
/// sup S' (attained at x = 1/2).
inline constexpr double kSmoothStepSlope = 2.0;

/// phi_R(x) = 1 - S(|x - center|/R - 1): 1 on the ball R, 0 beyond 2R.
struct Cutoff {
  double radius = 1.0;
  Point center{0.0, 0.0, 0.0};
  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  /// C in |grad phi_R| <= C / R.
  static constexpr double gradient_constant() { return kSmoothStepSlope; }
};

/// Cutoff centered in the box; throws DomainError when 2R exceeds L/2.
Cutoff make_cutoff(double radius, const Grid& g);
ScalarField cutoff_field(const Cutoff& c, const Grid& g);

/// ||f||_{L6, w_{3 delta}} / (||f||_{L2, w_delta} + ||grad f||_{L2, w_delta}).
double sobolev_embedding_ratio(const ScalarField& f, double delta);

/// Cube half-widths (in grid cells) {0, 1, 2, 4, ..., N/4}.
std::vector<int> maximal_radii(const Grid& g);

/// Max over the dyadic cube radii of the average of |f| on the cube
/// centered at each grid point (periodic wraparound).
ScalarField maximal_function(const ScalarField& f);

/// Constant C with |f * theta| <= C M f pointwise for the given kernel:
/// each superlevel set of the kernel weights is covered by the smallest
/// dyadic cube containing it. Throws DomainError if a level set does not fit.
double domination_constant(const Kernel& k);

enum class OperatorKind { riesz1, riesz2, riesz3, maximal, convolve };

/// ||op f|| / ||f|| in L^p with weight w_delta (centered); `kernel` is used by
/// the convolution operator. Requires 1 < p < inf and 0 <= delta < 3.
double operator_weighted_ratio(OperatorKind op, const ScalarField& f, double p,
                               double delta, const Kernel* kernel = nullptr);

}  // namespace mhdlab
