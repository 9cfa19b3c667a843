#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mhdlab/state.hpp"

namespace mhdlab {

/// p = sum R_i R_j (v_i u_j - c_i b_j - F_ij),
/// q = sum R_i R_j (v_i b_j - c_i u_j - G_ij), products dealiased.
std::pair<ScalarField, ScalarField> compute_p_q(const VectorField& u, const VectorField& b,
                                                const VectorField& v, const VectorField& c,
                                                const TensorField& F, const TensorField& G);

/// Unprojected right-hand sides
///   Lap u - div(v u - c b) - grad p + div F,
///   Lap b - div(v b - c u) - grad q + div G
/// assembled from the fields stored in the state.
std::pair<VectorField, VectorField> assembled_rhs(const SimState& s);

inline constexpr std::array<const char*, 12> kLedgerTerms = {
    "kinetic_magnetic_energy_a", "kinetic_magnetic_energy_b", "dissipation",
    "weight_gradient_term",      "transport_v",               "transport_c",
    "pressure_u",                "q_b",                       "forcing_F_grad",
    "forcing_F_weight",          "forcing_G_grad",            "forcing_G_weight"};

/// Term-by-term weighted energy balance on [t_a, t_b]:
///   E_w(t_b) + dissipation  vs  E_w(t_a) + (every other term).
/// slack = RHS - LHS.
struct EnergyLedger {
  double t_a = 0.0;
  double t_b = 0.0;
  std::array<double, 12> terms{};
  double slack = 0.0;

  double term(const std::string& name) const;
  double lhs() const;
  double rhs() const;
};

/// Rates of the balance at one state for the weight w.
LedgerRates ledger_rates(const SimState& s, const Weight& w);
/// Pairing integrands for one local test at one state.
LocalRates local_rates(const SimState& s, const LocalTestSpec& test);
/// Diagnostics row for a state: gamma 0 first, then `gammas`.
DiagnosticRow diagnostics_row(const SimState& s, const std::vector<double>& gammas,
                              const std::vector<LocalTestSpec>& tests);

/// Weighted balance on the window. Rates come from the trajectory rows when
/// gamma was tracked, otherwise from the stored states. 0 <= gamma <= 2.
EnergyLedger weighted_energy_ledger(const Trajectory& traj, double gamma, double t_a,
                                    double t_b);
/// The gamma = 0 balance.
EnergyLedger global_energy_ledger(const Trajectory& traj, double t_a, double t_b);
/// Ledgers on [t_first, t] for every available time t.
std::vector<EnergyLedger> cumulative_ledgers(const Trajectory& traj, double gamma);

/// Time profile alpha_{eta,t0,t1} and its derivative.
double local_time_profile(const LocalTestSpec& test, double t);
double local_time_profile_derivative(const LocalTestSpec& test, double t);

/// Space-time pairing of the local energy balance with the test function
///   int int e dt Phi + e Lap Phi - D Phi + (e v + p u + q b) . grad Phi
///           - (u.b) c . grad Phi + (u . div F + b . div G) Phi
/// with e = (|u|^2 + |b|^2)/2 and D = |grad u|^2 + |grad b|^2.
double local_energy_residual(const Trajectory& traj, const LocalTestSpec& test);
/// Space-time L2 norm of the test function.
double local_test_norm(const Trajectory& traj, const LocalTestSpec& test);

struct GronwallCertificate {
  double A = 0.0, B = 0.0, T = 0.0, T0 = 0.0;
  double T1 = 0.0;
  double bound = 0.0;
};

/// T1 = min(T, T0, 1 / (4 B (A + B T0)^2)), bound = sqrt(2) (A + B T0).
GronwallCertificate gronwall_bound(double A, double B, double T, double T0);

/// Solution of alpha' = margin B (1 + alpha^3), alpha(0) = margin A at the
/// requested times (RK4 with `substeps` steps per interval).
std::vector<double> gronwall_ode(double A, double B, double margin,
                                 const std::vector<double>& times, int substeps = 2000);

/// (||(u0, b0)||^2 + C (F + G)) exp(C (T + T^{1/3} (vc)^{2/3})) with
/// F, G the squared forcing norms and vc = int ||(v, c)||^3_{L3_w}.
double passive_control_bound(double u0_norm, double b0_norm, double F_norm_sq_int,
                             double G_norm_sq_int, double vc_L3_cubed_int, double T,
                             double C_gamma);

/// C (1 + ||(u0, b0)||^2 + FG); throws ConditionNotMet unless
/// C (1 + ||(u0, b0)||^2 + FG)^2 T0 <= 1.
double active_control_bound(double u0_norm, double b0_norm, double F_G_norm_sq_int,
                            double T0, double C_gamma);

/// ||f||_{L^{6/5}} with weight w_{6 gamma / 5}.
double pressure_membership_norm(const ScalarField& p, double gamma);

}  // namespace mhdlab
