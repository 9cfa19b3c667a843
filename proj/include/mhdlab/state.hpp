#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mhdlab/field.hpp"
#include "mhdlab/mollifier.hpp"
#include "mhdlab/weights.hpp"

namespace mhdlab {

/// Space-time forcing tensor given pointwise; entry (i, j) at 3*i + j.
struct ForcingSpec {
  using Fn = std::function<std::array<double, 9>(double t, const Point& x)>;
  Fn fn;  // empty means identically zero
  bool time_dependent = false;
  std::string description = "zero";

  bool is_zero() const { return !fn; }
  /// lambda^2 F(lambda^2 t, lambda x).
  ForcingSpec rescaled(double lambda) const;
  /// Entries with the coordinate axes permuted cyclically (x -> y -> z).
  ForcingSpec rotated() const;
};

/// Samples the forcing on the grid and removes modes beyond the dealias cutoff.
TensorField sample_forcing(const ForcingSpec& spec, const Grid& g, double t);

/// Named initial data.
struct InitialSpec {
  std::string type = "localized";  // localized | orszag_tang | shear | random | dss | snapshot | zero
  double amplitude = 1.0;
  double width = 0.08;  // fraction of L (localized)
  int modes = 3;        // band limit (random)
  std::string path;     // snapshot
  double dss_radius = 0.2;  // fraction of L (dss cutoff radius)
};

/// Space-time test function alpha_{eta,t0,t1}(t) beta(x) with a C-infinity
/// bump beta of the given radius (fraction of L) centered in the box.
struct LocalTestSpec {
  double t0 = 0.02;
  double t1 = 0.05;
  double eta = 0.04;
  double radius = 0.25;
};

enum class MollifierVariant { fixed, time_scaled };
enum class Driver { rk4, picard };

struct PicardSettings {
  double tol = 1e-10;
  int max_iters = 60;
  int window_steps = 8;
  /// Calibrated constant c of the existence time c eps^3 / (...)^2.
  double existence_c = 0.25;
};

struct SimConfig {
  Grid grid{16, 6.283185307179586};
  double epsilon = 0.0;  // absolute length
  KernelShape kernel = KernelShape::gaussian_bump;
  double gamma = 1.5;
  double dt = 1e-3;
  double t_end = 0.01;
  InitialSpec initial;
  ForcingSpec F;
  ForcingSpec G;
  MollifierVariant variant = MollifierVariant::fixed;
  PicardSettings picard;
  Driver driver = Driver::rk4;
  int snapshot_every = 10;
  int ledger_every = 1;
  std::uint64_t seed = 0;
  /// Weighted ledgers evaluated while the solver runs.
  std::vector<double> ledger_gammas;
  std::vector<LocalTestSpec> local_tests;
  /// Keep v, c, p, q, F, G in stored snapshots.
  bool keep_derived = true;
  /// Control constant used by the passive and active control bounds.
  double control_constant = 1.0;
};

struct SimState {
  double t = 0.0;
  VectorField u, b;
  VectorField v, c;  // drifts used at time t
  ScalarField p, q;
  TensorField F, G;
  void compact();
};

/// Instantaneous integrands of the weighted energy balance at one time.
struct LedgerRates {
  double energy = 0.0;  // sum (|u|^2 + |b|^2) w h^3
  double dissipation = 0.0;
  double weight_gradient = 0.0;
  double transport_v = 0.0;
  double transport_c = 0.0;
  double pressure_u = 0.0;
  double q_b = 0.0;
  double forcing_F_grad = 0.0;
  double forcing_F_weight = 0.0;
  double forcing_G_grad = 0.0;
  double forcing_G_weight = 0.0;
};

/// Spatial pairings for a local test: s1 = int e beta, s2 = int of the
/// remaining balance terms against beta and its derivatives.
struct LocalRates {
  double s1 = 0.0;
  double s2 = 0.0;
};

struct DiagnosticRow {
  double t = 0.0;
  std::vector<std::pair<double, LedgerRates>> ledgers;  // keyed by gamma
  std::vector<LocalRates> local;
};

struct Trajectory {
  std::vector<SimState> states;
  std::vector<DiagnosticRow> rows;
  std::vector<double> gammas;
  std::vector<LocalTestSpec> local_tests;
};

}  // namespace mhdlab
