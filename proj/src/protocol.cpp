#include "qb/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace qb {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

EnergeticsRecord record_for(const BatteryNuclear& rho, double t) {
  return ergotropy_decomposition(partial_trace_nuclear(rho), BatteryHamiltonian(1.0), t);
}

}  // namespace

void ProtocolSpec::validate() const {
  constants.validate();
  drive.validate();
  nuclear.validate();
  require_positive_splitting(constants, drive.b_z);
  if (!std::isfinite(theta_end) || theta_end < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "pulse area theta_end must be >= 0");
  }
  if (theta_end > 0.0 && !(drive.omega_rabi > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "pulse area theta_end = " + fmt(theta_end) + " needs a Rabi frequency > 0");
  }
  if (!std::isfinite(t_storage) || t_storage < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "storage duration must be >= 0");
  }
  if (storage_gamma && !(*storage_gamma >= 0.0 && std::isfinite(*storage_gamma))) {
    throw Error(ErrorCode::InvalidArgument, "storage decay rate must be >= 0");
  }
  if (charging_samples < 2 || storage_samples < 2) {
    throw Error(ErrorCode::InvalidArgument, "each stage needs at least 2 samples");
  }
}

double ProtocolSpec::charging_time() const {
  return theta_end > 0.0 ? theta_end / drive.omega_rabi : 0.0;
}

std::vector<EnergeticsRecord> run_storage(const BatteryNuclear& start, double gamma, double a_par,
                                          double t0, double duration, std::size_t samples,
                                          double steps_per_period) {
  if (!(duration > 0.0)) return {record_for(start, t0)};
  const LindbladModel model{0.0, 0.0, gamma, a_par};
  const TimeGrid grid = TimeGrid::for_model(t0, t0 + duration, samples, model, steps_per_period);
  return energetics_series(integrate(start, model, grid), BatteryHamiltonian(1.0));
}

ProtocolResult run_two_stage(const ProtocolSpec& spec) {
  spec.validate();
  const BatteryNuclear initial = build_initial_state(spec.nuclear);
  const double t_charge = spec.charging_time();

  ProtocolResult result{.charging = {}, .storage = {}, .handoff = initial, .t_handoff = t_charge};
  if (t_charge > 0.0) {
    const LindbladModel charging{spec.drive.detuning, spec.drive.omega_rabi, spec.drive.gamma,
                                 spec.constants.a_par};
    const TimeGrid grid =
        TimeGrid::for_model(0.0, t_charge, spec.charging_samples, charging, spec.steps_per_period);
    const Trajectory traj = integrate(initial, charging, grid);
    result.charging = energetics_series(traj, BatteryHamiltonian(1.0));
    result.handoff = traj.states.back();
  } else {
    result.charging = {record_for(initial, 0.0)};
  }

  result.storage = run_storage(result.handoff, spec.storage_decay(), spec.constants.a_par, t_charge,
                               spec.t_storage, spec.storage_samples, spec.steps_per_period);
  return result;
}

double storage_time(std::span<const EnergeticsRecord> series, double epsilon, double omega0) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "storage threshold epsilon must be > 0");
  }
  if (series.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "storage series needs at least 2 samples");
  }
  const double threshold = epsilon * omega0;
  std::size_t last = series.size();
  for (std::size_t i = series.size(); i-- > 0;) {
    if (series[i].ergotropy >= threshold) {
      last = i;
      break;
    }
  }
  if (last == series.size()) return 0.0;
  if (last + 1 == series.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "ergotropy is still above " + fmt(epsilon) + " * omega0 at the final sample (t = " +
                    fmt(series.back().t) + " us); use a longer storage duration");
  }
  const auto& a = series[last];
  const auto& b = series[last + 1];
  const double frac = (a.ergotropy - threshold) / (a.ergotropy - b.ergotropy);
  return a.t + frac * (b.t - a.t) - series.front().t;
}

}  // namespace qb
