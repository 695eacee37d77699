#include "qb/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace qb {

namespace {

constexpr double kPositivityHardFloor = 1e-6;
constexpr double kSteadyRhsNorm = 1e-10;
constexpr double kSteadyHorizon = 30.0;  // in units of 1/gamma

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

BatteryNuclear to_state(const Matrix4& m, std::size_t& warnings) {
  const double lowest = hermitian_eigensystem(m).values.front();
  if (lowest < -kPositivityHardFloor) {
    throw Error(ErrorCode::InvalidState,
                "positivity violated during integration: eigenvalue " + fmt(lowest) +
                    " (step too large or model error)");
  }
  if (lowest < -tolerance::kPositivity) ++warnings;
  return BatteryNuclear::with_positivity_floor(m, kPositivityHardFloor);
}

// Qubit Hamiltonian of one nuclear sector, (|e>, |g>) order.
Matrix2 sector_hamiltonian(double detuning, double omega_rabi) {
  return Matrix2{{detuning, 0.5 * omega_rabi}, {0.5 * omega_rabi, 0.0}};
}

// d/dt of a nuclear-sector block B = <n| rho |n'> (electron 2x2).
Matrix2 block_rhs(const Matrix2& h_row, const Matrix2& h_col, double gamma, const Matrix2& b) {
  const Matrix2 comm = h_row * b - b * h_col;
  Matrix2 out = comm * Complex(0.0, -1.0);
  // sigma B sigma^dag puts B_ee on gg; sigma^dag sigma = |e><e|.
  out(0, 0) -= gamma * b(0, 0);
  out(0, 1) -= 0.5 * gamma * b(0, 1);
  out(1, 0) -= 0.5 * gamma * b(1, 0);
  out(1, 1) += gamma * b(0, 0);
  return out;
}

Matrix2 block_rk4(const Matrix2& h_row, const Matrix2& h_col, double gamma, const Matrix2& b,
                  double dt) {
  const Matrix2 k1 = block_rhs(h_row, h_col, gamma, b);
  const Matrix2 k2 = block_rhs(h_row, h_col, gamma, b + k1 * (0.5 * dt));
  const Matrix2 k3 = block_rhs(h_row, h_col, gamma, b + k2 * (0.5 * dt));
  const Matrix2 k4 = block_rhs(h_row, h_col, gamma, b + k3 * dt);
  return b + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

}  // namespace

void LindbladModel::validate() const {
  if (!std::isfinite(detuning) || !std::isfinite(omega_rabi) || !std::isfinite(gamma) ||
      !std::isfinite(a_par)) {
    throw Error(ErrorCode::InvalidArgument, "model parameters must be finite");
  }
  if (omega_rabi < 0.0) throw Error(ErrorCode::InvalidArgument, "Rabi frequency must be >= 0");
  if (gamma < 0.0) throw Error(ErrorCode::InvalidArgument, "decay rate must be >= 0");
  if (a_par < 0.0) throw Error(ErrorCode::InvalidArgument, "hyperfine coupling must be >= 0");
}

double LindbladModel::shortest_period() const {
  const double rate = std::max({std::abs(detuning) + a_par, omega_rabi, gamma, mhz_to_angular(0.01)});
  return kTwoPi / rate;
}

TimeGrid TimeGrid::for_model(double t_start, double t_end, std::size_t n_samples,
                             const LindbladModel& model, double steps_per_period) {
  TimeGrid g;
  g.t_start = t_start;
  g.t_end = t_end;
  g.n_samples = n_samples;
  g.dt_internal = model.shortest_period() / std::max(steps_per_period, 200.0);
  g.validate();
  return g;
}

void TimeGrid::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    throw Error(ErrorCode::InvalidArgument, "time grid needs t_end > t_start");
  }
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "time grid needs at least 2 samples");
  if (!(dt_internal > 0.0)) throw Error(ErrorCode::InvalidArgument, "internal step must be > 0");
}

double TimeGrid::time(std::size_t i) const {
  if (i + 1 == n_samples) return t_end;
  return t_start + static_cast<double>(i) * spacing();
}

std::size_t TimeGrid::substeps() const {
  const double ratio = spacing() / dt_internal;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
}

Matrix4 rk4_step(const Matrix4& h, double gamma, const Matrix4& rho, double dt) {
  const Matrix4 k1 = lindblad_rhs(h, gamma, rho);
  const Matrix4 k2 = lindblad_rhs(h, gamma, rho + k1 * (0.5 * dt));
  const Matrix4 k3 = lindblad_rhs(h, gamma, rho + k2 * (0.5 * dt));
  const Matrix4 k4 = lindblad_rhs(h, gamma, rho + k3 * dt);
  return rho + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

Trajectory integrate(const BatteryNuclear& rho0, const LindbladModel& model, const TimeGrid& grid) {
  model.validate();
  grid.validate();
  if (grid.dt_internal > model.max_step() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument,
                "internal step " + fmt(grid.dt_internal) + " us exceeds the stability limit " +
                    fmt(model.max_step()) + " us (shortest period / 200)");
  }

  const Matrix4 h = model.hamiltonian();
  const std::size_t substeps = grid.substeps();
  const double dt = grid.step();

  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(grid.n_samples);
  traj.states.push_back(rho0);

  Matrix4 rho = rho0.matrix();
  for (std::size_t i = 1; i < grid.n_samples; ++i) {
    for (std::size_t s = 0; s < substeps; ++s) {
      rho = hermitian_part(rk4_step(h, model.gamma, rho, dt));
    }
    traj.states.push_back(to_state(rho, traj.positivity_warnings));
  }
  return traj;
}

Qubit steady_state_qubit(double detuning, double omega_rabi, double gamma) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::NoSteadyState,
                "no steady state: decay rate gamma must be > 0 (got " + fmt(gamma) + ")");
  }
  if (!std::isfinite(detuning) || !std::isfinite(omega_rabi) || omega_rabi < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "steady state needs finite detuning and Rabi frequency >= 0");
  }
  const double w2 = omega_rabi * omega_rabi;
  const double eta = 4.0 * detuning * detuning + 2.0 * w2 + gamma * gamma;
  const Complex coherence(-2.0 * detuning * omega_rabi, -gamma * omega_rabi);
  Matrix2 m{{w2, coherence}, {std::conj(coherence), eta - w2}};
  return Qubit(m * (1.0 / eta));
}

Qubit steady_state_reduced(const NuclearInit& init, double detuning, double omega_rabi,
                           double gamma, double a_par) {
  init.validate();
  const double up = std::pow(std::sin(0.5 * init.psi), 2);
  const double down = std::pow(std::cos(0.5 * init.psi), 2);
  const Matrix2 m = steady_state_qubit(detuning, omega_rabi, gamma).matrix() * down +
                    steady_state_qubit(detuning + a_par, omega_rabi, gamma).matrix() * up;
  return Qubit(hermitian_part(m));
}

BatteryNuclear storage_closed_form(const BatteryNuclear& rho0, double gamma, double a_par,
                                   double t) {
  if (!(gamma >= 0.0) || !std::isfinite(a_par) || !std::isfinite(t) || t < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "storage evolution needs gamma >= 0 and t >= 0");
  }
  const Matrix4& r0 = rho0.matrix();
  // Level energies of H = a_par |e up><e up|.
  const std::array<double, 4> energy = {a_par, 0.0, 0.0, 0.0};
  const auto excited = [](std::size_t i) { return i < 2; };

  Matrix4 r;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const Complex phase = std::polar(1.0, -(energy[i] - energy[j]) * t);
      if (excited(i) && excited(j)) {
        r(i, j) = r0(i, j) * std::exp(-gamma * t) * phase;
      } else if (excited(i) || excited(j)) {
        r(i, j) = r0(i, j) * std::exp(-0.5 * gamma * t) * phase;
      } else {
        // Ground block: initial value plus the feed from the matching excited
        // element, gamma * int_0^t rho_{i-2,j-2}(s) ds.
        const Complex rate(gamma, energy[i - 2] - energy[j - 2]);
        Complex feed = 0.0;
        if (std::abs(rate) > 0.0) feed = gamma * (1.0 - std::exp(-rate * t)) / rate;
        r(i, j) = r0(i, j) + r0(i - 2, j - 2) * feed;
      }
    }
  }
  return BatteryNuclear(hermitian_part(r));
}

Trajectory block_evolve_oracle(const BatteryNuclear& rho0, const LindbladModel& model,
                               const TimeGrid& grid) {
  model.validate();
  grid.validate();
  // Sector 0 = nuclear up, sector 1 = nuclear down.
  const std::array<Matrix2, 2> h = {sector_hamiltonian(model.detuning + model.a_par, model.omega_rabi),
                                    sector_hamiltonian(model.detuning, model.omega_rabi)};
  std::array<std::array<Matrix2, 2>, 2> blocks;
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t m = 0; m < 2; ++m)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) blocks[n][m](a, b) = rho0(2 * a + n, 2 * b + m);

  const std::size_t substeps = grid.substeps();
  const double dt = grid.step();

  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(grid.n_samples);
  traj.states.push_back(rho0);
  for (std::size_t i = 1; i < grid.n_samples; ++i) {
    for (std::size_t s = 0; s < substeps; ++s)
      for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t m = 0; m < 2; ++m)
          blocks[n][m] = block_rk4(h[n], h[m], model.gamma, blocks[n][m], dt);

    Matrix4 rho;
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) rho(2 * a + n, 2 * b + m) = blocks[n][m](a, b);
    traj.states.push_back(to_state(hermitian_part(rho), traj.positivity_warnings));
  }
  return traj;
}

SteadyIntegration integrate_to_steady(const BatteryNuclear& rho0, const LindbladModel& model,
                                      double steps_per_period) {
  model.validate();
  if (!(model.gamma > 0.0)) {
    throw Error(ErrorCode::NoSteadyState, "no steady state: decay rate gamma must be > 0");
  }
  const Matrix4 h = model.hamiltonian();
  const double dt = model.shortest_period() / std::max(steps_per_period, 200.0);
  const double horizon = kSteadyHorizon / model.gamma;
  constexpr int kCheckEvery = 64;

  Matrix4 rho = rho0.matrix();
  double t = 0.0;
  bool converged = false;
  for (long step = 0; t <= horizon; ++step) {
    if (step % kCheckEvery == 0 &&
        lindblad_rhs(h, model.gamma, rho).frobenius_norm() < kSteadyRhsNorm) {
      converged = true;
      break;
    }
    rho = hermitian_part(rk4_step(h, model.gamma, rho, dt));
    t += dt;
  }
  std::size_t warnings = 0;
  return SteadyIntegration{to_state(rho, warnings), t, converged};
}

}  // namespace qb
