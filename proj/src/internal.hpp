#pragma once

#include <functional>
#include <vector>

#include "mhdlab/evolution.hpp"

namespace mhdlab::detail {

/// (div T^u, div T^b) with T^u = v u - c b, T^b = v b - c u; dealiased, not
/// projected.
FieldPair tensor_divergences(const VectorField& u, const VectorField& b,
                             const VectorField& v, const VectorField& c);

/// sqrt(||du||^2 + ||db||^2) by Plancherel.
double pair_distance(const FieldPair& x, const FieldPair& y);
double pair_norm(const FieldPair& x);

/// Number of steps of size dt covering `span`; throws DomainError unless
/// span is a positive integer multiple of dt.
long checked_steps(double span, double dt);

/// Integral of samples at the given times: Gregory weights on uniform
/// spacing, trapezoid otherwise.
double integrate_samples(const std::vector<double>& t, const std::vector<double>& y);

/// I_n = int_{t_0}^{t_n} e^{(t_n - s) Lap} g(s) ds, n = 0..M, for node
/// values g_0..g_M with spacing h (piecewise-cubic interpolation in time).
std::vector<FieldPair> duhamel_sum(const Grid& g, const std::vector<FieldPair>& gv,
                                   double h);

using NodeOp = std::function<FieldPair(int node, const FieldPair& U)>;

struct WindowResult {
  std::vector<FieldPair> nodes;   // U(t_a + n h), n = 0..M
  std::vector<double> distances;  // successive-iterate distances
};

/// Picard iteration U = a + D[bil(U)] on one window, where a carries the
/// heat flow of u0 and the forcing integral. Throws PicardDivergence.
WindowResult picard_window(const MhdSystem& sys, const FieldPair& u0, double t_a,
                           double h, int M, const NodeOp& bil, PicardStart how,
                           double tol, int max_iters);

}  // namespace mhdlab::detail
