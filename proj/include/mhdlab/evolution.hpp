#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "mhdlab/mollifier.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

using FieldPair = std::pair<VectorField, VectorField>;

/// Non-finite values appeared; carries the last finite state.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, SimState last) : Error(what), last_(std::move(last)) {}
  const SimState& last_valid() const { return last_; }

 private:
  SimState last_;
};

/// Divergence-free, dealiased initial data for the configured grid.
FieldPair make_initial(const InitialSpec& spec, const Grid& g, std::uint64_t seed);

/// Operators of the mollified system for one configuration: drifts, forcing
/// and the projected nonlinearity. Kernels and heat multipliers are cached.
class MhdSystem {
 public:
  explicit MhdSystem(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const Grid& grid() const { return cfg_.grid; }

  /// Kernel at time t. The time-scaled variant uses scale eps sqrt(t),
  /// clamped from below at the resolvability threshold.
  const Kernel& kernel_at(double t) const;
  FieldPair drifts(double t, const VectorField& u, const VectorField& b) const;
  const TensorField& forcing_F(double t) const;
  const TensorField& forcing_G(double t) const;

  /// (P[div F - div T^u], P[div G - div T^b]) with T^u = v u - c b and
  /// T^b = v b - c u (tensor products, dealiased).
  FieldPair rhs_nonlinear(double t, const VectorField& u, const VectorField& b) const;
  /// Same with prescribed drifts; `with_forcing` adds the forcing terms.
  FieldPair rhs_with_drifts(double t, const VectorField& u, const VectorField& b,
                            const VectorField& v, const VectorField& c,
                            bool with_forcing) const;

  /// Spectral multiplier exp(-|k|^2 tau), cached per tau.
  const std::vector<double>& heat_multiplier(double tau) const;
  VectorField heat(const VectorField& f, double tau) const;

  /// State at time t with drifts, p, q and forcing filled in.
  SimState complete(double t, VectorField u, VectorField b) const;
  SimState complete_with_drifts(double t, VectorField u, VectorField b,
                                VectorField v, VectorField c) const;

 private:
  SimConfig cfg_;
  mutable std::unique_ptr<Kernel> kernel_;
  mutable double kernel_scale_ = -1.0;
  mutable std::map<double, std::vector<double>> heat_;
  mutable TensorField F_cache_, G_cache_;
  mutable double F_time_ = -1.0, G_time_ = -1.0;
  mutable bool F_valid_ = false, G_valid_ = false;
};

/// e^{t Lap}(u0, b0) + int_0^t e^{(t-s) Lap} P(div F, div G)(s) ds with
/// piecewise-cubic interpolation of the forcing on `steps` sub-intervals.
FieldPair duhamel_linear_part(const VectorField& u0, const VectorField& b0,
                              const ForcingSpec& F, const ForcingSpec& G, double t,
                              int steps = 16);

/// (P[(v.grad)u - (c.grad)b], P[(v.grad)b - (c.grad)u]) in divergence form
/// with dealiased products.
FieldPair bilinear_terms(const VectorField& u, const VectorField& b,
                         const VectorField& v, const VectorField& c);

/// min(T1, c eps^3 / (||(u0, b0)||_L2 + forcing_l2l2)^2). Zero data and
/// forcing returns T1.
double existence_time(const VectorField& u0, const VectorField& b0,
                      double forcing_l2l2, double epsilon, double c_cal, double T1);

/// ||(F, G)||_{L2(0,T; L2)} of the sampled forcing by time quadrature.
double forcing_l2l2_norm(const SimConfig& cfg, double T, int steps = 16);

/// Exponential moments int_0^1 exp(-z (1 - s)) s^p ds for p = 0..3.
std::array<double, 4> exp_moments(double z);

enum class PicardStart { zero, linear, perturbed };

struct PicardResult {
  Trajectory trajectory;
  std::vector<double> distances;  // sup-in-time L2 distance of successive iterates
  std::vector<double> ratios;     // distances[k+1] / distances[k]
  int iterations = 0;
  double contraction = 0.0;       // largest measured ratio
  bool geometric = false;         // every ratio <= the first ratio
};

/// Fixed point of U = a + B(U, U) on [t_a, t_b] from the state at t_a.
PicardResult picard_solve(const SimConfig& cfg, const SimState& start, double t_b,
                          PicardStart how = PicardStart::linear);
/// Same, starting from the configured initial data at t_a.
PicardResult picard_solve(const SimConfig& cfg, double t_a, double t_b,
                          PicardStart how = PicardStart::linear);

/// One integrating-factor RK4 step. Throws BlowUp on non-finite output.
SimState step(const SimState& s, double dt, const MhdSystem& sys);
SimState step(const SimState& s, double dt, const SimConfig& cfg);

/// Trajectory on [0, t_end] from the configured initial data.
Trajectory solve_mhdg(const SimConfig& cfg);
Trajectory solve_mhdg(const SimConfig& cfg, const SimState& initial);

/// Drift sample for the linear advection-diffusion solve.
struct DriftSample {
  double t = 0.0;
  VectorField v, c;
};

/// Drifts recorded in a trajectory's states.
std::vector<DriftSample> drifts_of(const Trajectory& traj);

/// Solves the system with prescribed drifts, which must be supplied at every
/// node t_0 + n dt of [0, t_end].
Trajectory solve_ad(const SimConfig& cfg, const SimState& initial,
                    const std::vector<DriftSample>& drifts);

struct EpsStudy {
  std::vector<double> eps;        // absolute scales
  std::vector<double> distances;  // L2(0,T; L2) distance of consecutive solutions
  bool strictly_decreasing = false;
};

/// Runs the configuration at each scale (absolute lengths, decreasing).
EpsStudy epsilon_convergence_study(const SimConfig& cfg, const std::vector<double>& eps_list);

/// Largest c with measured Picard contraction <= target on windows of length
/// existence_time(c), minimized over the battery.
double calibrate_existence_constant(const std::vector<SimConfig>& battery,
                                    double target = 0.9);

}  // namespace mhdlab
