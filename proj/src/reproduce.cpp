#include "qb/reproduce.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qb {

namespace {

constexpr double kReferenceField = 482.0;
constexpr double kStorageWindow = 30.0;      // us
constexpr std::size_t kStorageSamples = 6001;

ProtocolSpec reference_protocol(double theta_end) {
  ProtocolSpec spec;
  spec.drive.omega_rabi = mhz_to_angular(1.0);
  spec.drive.gamma = mhz_to_angular(0.1);
  spec.drive.b_z = kReferenceField;
  spec.theta_end = theta_end;
  spec.t_storage = kStorageWindow;
  spec.storage_samples = kStorageSamples;
  return spec;
}

template <class Member>
const EnergeticsRecord& peak_of(const std::vector<EnergeticsRecord>& series, Member member) {
  const EnergeticsRecord* best = &series.front();
  for (const auto& r : series)
    if (r.*member > best->*member) best = &r;
  return *best;
}

constexpr double kFigureGamma = 0.1;  // MHz

}  // namespace

ProtocolSpec fig2_protocol(char panel) {
  ProtocolSpec spec;
  spec.drive.omega_rabi = mhz_to_angular(0.5);
  switch (panel) {
    case 'a':
      spec.theta_end = spec.drive.omega_rabi * 4.0;
      spec.t_storage = 0.0;
      spec.charging_samples = 801;
      break;
    case 'b':
      spec.drive.gamma = mhz_to_angular(kFigureGamma);
      spec.theta_end = spec.drive.omega_rabi * 20.0;
      spec.t_storage = 0.0;
      spec.charging_samples = 2001;
      break;
    case 'c':
    case 'd':
      spec.storage_gamma = mhz_to_angular(kFigureGamma);
      spec.theta_end = panel == 'c' ? std::numbers::pi : std::numbers::pi / 2;
      spec.t_storage = 20.0;
      spec.charging_samples = 101;
      spec.storage_samples = 2001;
      break;
    default:
      throw Error(ErrorCode::InvalidArgument, std::string("no figure-2 preset for panel '") + panel + "'");
  }
  return spec;
}

SweepBase fig3_base(AxisName swept) {
  SweepBase base;
  base.drive.gamma = mhz_to_angular(kFigureGamma);
  if (swept == AxisName::delta) base.drive.omega_rabi = mhz_to_angular(1.0);
  base.steps_per_period = 200.0;
  return base;
}

SweepAxis fig3_axis(AxisName swept) {
  const double a_par = PhysicalConstants{}.a_par;
  if (swept == AxisName::omega_rabi) {
    return {AxisName::omega_rabi, mhz_to_angular(0.01), mhz_to_angular(0.4), 40};
  }
  if (swept == AxisName::delta) return {AxisName::delta, -2.0 * a_par, 2.0 * a_par, 81};
  throw Error(ErrorCode::InvalidArgument, "figure-3 maps sweep omega or delta");
}

double fig3_window() { return 20.0 / mhz_to_angular(kFigureGamma); }

SweepBase fig4_base(double omega_mhz) {
  SweepBase base;
  base.drive.omega_rabi = mhz_to_angular(omega_mhz);
  base.drive.gamma = mhz_to_angular(kFigureGamma);
  base.steps_per_period = 200.0;
  return base;
}

std::array<SweepAxis, 2> fig4_axes() {
  const double a_par = PhysicalConstants{}.a_par;
  // Cell = A_par/40, so 0 and -A_par are grid points.
  return {SweepAxis{AxisName::psi, 0.0, std::numbers::pi, 37},
          SweepAxis{AxisName::delta, -2.0 * a_par, a_par, 121}};
}

SweepAxis regime_omega_grid() {
  const double gamma = mhz_to_angular(kFigureGamma);
  return {AxisName::omega_rabi, 0.1 * gamma, 3.2 * gamma, 311};
}

SweepBase regime_base() {
  SweepBase base;
  base.drive.gamma = mhz_to_angular(kFigureGamma);
  base.steps_per_period = 200.0;
  return base;
}

DiscussionReport discussion_report(double epsilon) {
  DiscussionReport rep;
  rep.epsilon = epsilon;
  const PhysicalConstants constants;
  rep.omega0_uev = qb_splitting(constants, kReferenceField).energy_uev;

  const auto full = run_two_stage(reference_protocol(std::numbers::pi));
  const auto& inc = peak_of(full.charging, &EnergeticsRecord::incoherent);
  rep.incoherent_peak = inc.incoherent;
  rep.incoherent_peak_time = inc.t;

  const auto half = run_two_stage(reference_protocol(std::numbers::pi / 2));
  std::vector<EnergeticsRecord> joined = half.charging;
  joined.insert(joined.end(), half.storage.begin() + 1, half.storage.end());
  const auto& coh = peak_of(joined, &EnergeticsRecord::coherent);
  rep.coherent_peak = coh.coherent;
  rep.coherent_peak_time = coh.t;
  rep.coherent_peak_ratio = coh.ratio_coh.value_or(0.0);

  ProtocolSpec free_drive = reference_protocol(std::numbers::pi);  // 0.5 us of drive
  free_drive.t_storage = 0.0;
  const auto free = run_two_stage(free_drive);
  const auto& fcoh = peak_of(free.charging, &EnergeticsRecord::coherent);
  rep.free_coherent_peak = fcoh.coherent;
  rep.free_coherent_peak_time = fcoh.t;
  rep.free_coherent_peak_ratio = fcoh.ratio_coh.value_or(0.0);

  const double gamma = mhz_to_angular(0.1);
  const double a_par = constants.a_par;
  const double r = std::sqrt(0.5);
  const auto full_ideal = run_storage(BatteryNuclear::pure({0.0, 1.0, 0.0, 0.0}), gamma, a_par, 0.0,
                                      kStorageWindow, kStorageSamples);
  const auto half_ideal = run_storage(BatteryNuclear::pure({0.0, r, 0.0, r}), gamma, a_par, 0.0,
                                      kStorageWindow, kStorageSamples);
  rep.t_star_full_ideal = storage_time(full_ideal, epsilon);
  rep.t_star_half_ideal = storage_time(half_ideal, epsilon);
  rep.ratio_ideal = rep.t_star_half_ideal / rep.t_star_full_ideal;

  rep.t_star_full_pipeline = storage_time(full.storage, epsilon);
  rep.t_star_half_pipeline = storage_time(half.storage, epsilon);
  rep.ratio_pipeline = rep.t_star_half_pipeline / rep.t_star_full_pipeline;
  return rep;
}

double printed_steady_ergotropy(double detuning, double omega_rabi, double gamma) {
  const double w2 = omega_rabi * omega_rabi;
  const double eta = 4.0 * detuning * detuning + 2.0 * w2 + gamma * gamma;
  const double root = std::sqrt(4.0 * detuning * detuning + gamma * gamma);
  return root * (std::sqrt(eta + 2.0 * w2) - root) / eta;
}

ArbitrationReport steady_ergotropy_arbitration() {
  ArbitrationReport rep;
  const BatteryHamiltonian hb(1.0);
  for (double delta_mhz : {-1.0, -0.3, 0.0, 0.4, 2.0}) {
    for (double omega_mhz : {0.02, 0.06, 0.3, 1.0, 3.0}) {
      for (double gamma_mhz : {0.01, 0.1, 0.34}) {
        ArbitrationPoint p;
        p.detuning = mhz_to_angular(delta_mhz);
        p.omega_rabi = mhz_to_angular(omega_mhz);
        p.gamma = mhz_to_angular(gamma_mhz);
        p.numeric =
            ergotropy_decomposition(steady_state_qubit(p.detuning, p.omega_rabi, p.gamma), hb).ergotropy;
        p.printed = printed_steady_ergotropy(p.detuning, p.omega_rabi, p.gamma);
        p.halved = 0.5 * p.printed;
        rep.max_dev_printed = std::max(rep.max_dev_printed, std::abs(p.numeric - p.printed));
        rep.max_dev_halved = std::max(rep.max_dev_halved, std::abs(p.numeric - p.halved));
        rep.points.push_back(p);
      }
    }
  }
  rep.printed_matches = rep.max_dev_printed <= 1e-9;
  rep.halved_matches = rep.max_dev_halved <= 1e-9;
  return rep;
}

}  // namespace qb
