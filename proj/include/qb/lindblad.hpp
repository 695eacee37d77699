#pragma once

#include <cstddef>
#include <vector>

#include "qb/nv_model.hpp"
#include "qb/qcore.hpp"

namespace qb {

// Parameters of the rotating-frame master equation for battery + nucleus.
struct LindbladModel {
  double detuning = 0.0;
  double omega_rabi = 0.0;
  double gamma = 0.0;
  double a_par = mhz_to_angular(2.14);

  void validate() const;
  Matrix4 hamiltonian() const { return build_effective_hamiltonian(detuning, omega_rabi, a_par); }

  // 2pi / max(|detuning| + a_par, omega_rabi, gamma, 2pi * 0.01 MHz)
  double shortest_period() const;
  // Largest accepted internal step: shortest_period() / 200.
  double max_step() const { return shortest_period() / 200.0; }
};

// Default internal resolution used by the convenience constructors. Well
// inside the enforced T/200 limit so sampled elements are converged to ~1e-10.
inline constexpr double kDefaultStepsPerPeriod = 1000.0;

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t n_samples = 2;
  double dt_internal = 1e-3;  // upper bound; the actual step divides the sample spacing

  static TimeGrid for_model(double t_start, double t_end, std::size_t n_samples,
                            const LindbladModel& model,
                            double steps_per_period = kDefaultStepsPerPeriod);

  void validate() const;
  double spacing() const { return (t_end - t_start) / static_cast<double>(n_samples - 1); }
  double time(std::size_t i) const;
  std::size_t substeps() const;
  double step() const { return spacing() / static_cast<double>(substeps()); }
};

struct Trajectory {
  TimeGrid grid;
  std::vector<BatteryNuclear> states;
  // Samples whose smallest eigenvalue fell in [-1e-6, -1e-9).
  std::size_t positivity_warnings = 0;

  double time(std::size_t i) const { return grid.time(i); }
};

// One classic fourth-order step of the master equation.
Matrix4 rk4_step(const Matrix4& h, double gamma, const Matrix4& rho, double dt);

// Fixed-step RK4 integration, re-symmetrized after each step. Throws
// ErrorCode::InvalidArgument when grid.dt_internal exceeds model.max_step(),
// ErrorCode::InvalidState when a sample eigenvalue drops below -1e-6.
Trajectory integrate(const BatteryNuclear& rho0, const LindbladModel& model, const TimeGrid& grid);

// Closed-form steady state of the driven, decaying qubit in (|e>, |g>) order:
// (1/eta) [[W^2, -2 D W - i g W], [-2 D W + i g W, eta - W^2]],
// eta = 4 D^2 + 2 W^2 + g^2. Throws ErrorCode::NoSteadyState for gamma == 0.
Qubit steady_state_qubit(double detuning, double omega_rabi, double gamma);

// Battery steady state when the nucleus starts in |psi>: the up sector sees
// detuning + a_par, the down sector sees detuning.
Qubit steady_state_reduced(const NuclearInit& init, double detuning, double omega_rabi,
                           double gamma, double a_par);

// Exact drive-off evolution (H = a_par |e up><e up|).
BatteryNuclear storage_closed_form(const BatteryNuclear& rho0, double gamma, double a_par, double t);

// Evolves the four nuclear-sector 2x2 blocks separately with the same RK4
// stepping as integrate() and reassembles them.
Trajectory block_evolve_oracle(const BatteryNuclear& rho0, const LindbladModel& model,
                               const TimeGrid& grid);

struct SteadyIntegration {
  BatteryNuclear state;
  double t = 0.0;
  bool rhs_converged = false;  // false: stopped at the 30/gamma horizon
};

// Numeric fallback: integrate until ||rhs||_F < 1e-10 or t > 30/gamma.
SteadyIntegration integrate_to_steady(const BatteryNuclear& rho0, const LindbladModel& model,
                                      double steps_per_period = 200.0);

}  // namespace qb
