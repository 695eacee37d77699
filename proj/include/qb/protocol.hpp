#pragma once

// Two-stage charge/store protocol: the drive charges the battery up to a
// chosen pulse area, then is switched off (Rabi frequency and detuning both
// zero) while the battery self-discharges.

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "qb/energetics.hpp"
#include "qb/lindblad.hpp"
#include "qb/nv_model.hpp"

namespace qb {

struct ProtocolSpec {
  PhysicalConstants constants;
  DriveParams drive;                    // charging stage; drive.gamma applies while charging
  std::optional<double> storage_gamma;  // decay during storage; defaults to drive.gamma
  NuclearInit nuclear;
  double theta_end = std::numbers::pi;  // pulse area Omega * t at handoff
  double t_storage = 10.0;              // us
  std::size_t charging_samples = 501;
  std::size_t storage_samples = 2001;
  double steps_per_period = kDefaultStepsPerPeriod;

  void validate() const;
  double charging_time() const;
  double storage_decay() const { return storage_gamma.value_or(drive.gamma); }
};

// Energies are in units of omega0 (H_b = |e><e|).
struct ProtocolResult {
  std::vector<EnergeticsRecord> charging;
  std::vector<EnergeticsRecord> storage;  // storage.front() is the handoff sample
  BatteryNuclear handoff;
  double t_handoff = 0.0;
};

ProtocolResult run_two_stage(const ProtocolSpec& spec);

// Storage stage alone from an arbitrary battery+nucleus state, starting at t0.
std::vector<EnergeticsRecord> run_storage(const BatteryNuclear& start, double gamma, double a_par,
                                          double t0, double duration, std::size_t samples,
                                          double steps_per_period = kDefaultStepsPerPeriod);

// Storage time: the last time (measured from series.front().t) at which
// W >= epsilon * omega0, linearly interpolated between samples. Throws if W is
// still above threshold at the final sample.
double storage_time(std::span<const EnergeticsRecord> series, double epsilon, double omega0 = 1.0);

inline constexpr double kDefaultStorageEpsilon = 1e-3;

}  // namespace qb
