// Acceptance checks. `qb_acceptance N` runs criterion N, `qb_acceptance all`
// runs every criterion. One [PASS]/[FAIL] line per criterion; exit status is
// nonzero when any criterion failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qb/energetics.hpp"
#include "qb/lindblad.hpp"
#include "qb/protocol.hpp"
#include "qb/reproduce.hpp"
#include "qb/sweep.hpp"
#include "support.hpp"

using namespace qb;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const BatteryHamiltonian kHb(1.0);

Verdict ideal_charging() {
  LindbladModel m;
  m.omega_rabi = mhz_to_angular(0.5);
  const auto traj = integrate(build_initial_state({0.0}), m, TimeGrid::for_model(0.0, 4.0, 4001, m));
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double p = partial_trace_nuclear(traj.states[i])(0, 0).real();
    worst = std::max(worst, std::abs(p - std::pow(std::sin(m.omega_rabi * traj.time(i) / 2.0), 2)));
  }
  return {worst <= 1e-8, "max |p_e - sin^2(Wt/2)| = " + num(worst) + " (tol 1e-8)"};
}

Verdict steady_state() {
  const double gamma = mhz_to_angular(0.1);
  double worst = 0.0;
  double worst_inc = 0.0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      LindbladModel m;
      m.detuning = mhz_to_angular(-2.0 + 1.0 * i);
      m.omega_rabi = mhz_to_angular(0.2 + 0.45 * j);
      m.gamma = gamma;
      const double t_end = 40.0 / gamma;
      const auto traj = integrate(build_initial_state({0.0}), m, TimeGrid::for_model(0.0, t_end, 2, m, 200.0));
      const Qubit numeric = partial_trace_nuclear(traj.states.back());
      const Qubit exact = steady_state_qubit(m.detuning, m.omega_rabi, gamma);
      worst = std::max(worst, (numeric.matrix() - exact.matrix()).max_abs());
      for (const Qubit& q : {numeric, exact}) {
        const auto rec = ergotropy_decomposition(q, kHb);
        worst_inc = std::max(worst_inc, std::abs(rec.incoherent));
        if (rec.ratio_coh) worst_ratio = std::max(worst_ratio, std::abs(*rec.ratio_coh - 1.0));
      }
    }
  }
  return {worst <= 1e-6 && worst_inc <= 1e-9 && worst_ratio <= 1e-9,
          "max entry error = " + num(worst) + " (tol 1e-6), max |W_inc| = " + num(worst_inc) +
              ", max |ratio_coh - 1| = " + num(worst_ratio) + " (tol 1e-9)"};
}

Verdict energy_scale() {
  const double e = qb_splitting(PhysicalConstants{}, 482.0).energy_uev;
  const double rel = std::abs(e - 6.28) / 6.28;
  return {rel <= 0.005, "hbar*w0 = " + num(e) + " ueV, deviation from 6.28 = " + num(100.0 * rel) + "% (tol 0.5%)"};
}

Verdict discussion_peaks() {
  const auto d = discussion_report();
  const bool inc_ok = std::abs(d.incoherent_peak - 1.0) <= 0.05 && std::abs(d.incoherent_peak_time - 0.5) <= 0.05;
  const bool coh_ok = std::abs(d.coherent_peak - 0.5) <= 0.025 && std::abs(d.coherent_peak_time - 0.25) <= 0.025 &&
                      d.coherent_peak_ratio >= 0.99;
  return {inc_ok && coh_ok,
          "theta=pi: peak W_inc = " + num(d.incoherent_peak) + " w0 at " + num(d.incoherent_peak_time) +
              " us (want 1 +- 5% near 0.5 us); theta=pi/2: peak W_coh = " + num(d.coherent_peak) + " w0 at " +
              num(d.coherent_peak_time) + " us, ratio " + num(d.coherent_peak_ratio) +
              " (want 0.5 +- 5% near 0.25 us, ratio >= 0.99); drive left on: W_coh = " +
              num(d.free_coherent_peak) + " at " + num(d.free_coherent_peak_time) + " us, ratio " +
              num(d.free_coherent_peak_ratio)};
}

Verdict storage_times() {
  const double eps = 1e-3;
  const auto d = discussion_report(eps);
  const double g = mhz_to_angular(0.1);
  const double full_oracle = std::log(2.0) / g;
  const double half_oracle = std::log(1.0 / (4.0 * eps)) / g;
  const bool full_ok = std::abs(d.t_star_full_ideal - 1.103) <= 0.01 * 1.103 &&
                       std::abs(d.t_star_full_ideal - full_oracle) <= 0.01 * full_oracle;
  const bool half_ok = std::abs(d.t_star_half_ideal - 8.79) <= 0.02 * 8.79 &&
                       std::abs(d.t_star_half_ideal - half_oracle) <= 0.02 * half_oracle;
  const bool ratio_ok = d.ratio_ideal >= 7.5 && d.ratio_ideal <= 8.5;
  const bool pipe_ok = d.ratio_pipeline >= 7.0 && d.ratio_pipeline <= 9.5;
  return {full_ok && half_ok && ratio_ok && pipe_ok,
          "t*_full = " + num(d.t_star_full_ideal) + " us (oracle " + num(full_oracle) + ", want 1.103 +- 1%), t*_half = " +
              num(d.t_star_half_ideal) + " us (oracle " + num(half_oracle) + ", want 8.79 +- 2%), ratio = " +
              num(d.ratio_ideal) + " (want [7.5, 8.5]), pipeline ratio = " + num(d.ratio_pipeline) + " (t*_full " +
              num(d.t_star_full_pipeline) + ", t*_half " + num(d.t_star_half_pipeline) + "; want [7, 9.5])"};
}

Verdict optima() {
  const double gamma = mhz_to_angular(0.1);
  const double a_par = PhysicalConstants{}.a_par;
  SweepBase b = fig3_base(AxisName::omega_rabi);
  const auto o1 = find_coherence_optimum(SweepAxis{AxisName::omega_rabi, 0.1 * gamma, 3.0 * gamma, 59}, b);
  SweepBase bd = fig3_base(AxisName::delta);
  bd.drive.omega_rabi = mhz_to_angular(1.0);
  const auto o2 = find_coherence_optimum(SweepAxis{AxisName::delta, 0.0, 2.0 * a_par, 81}, bd);
  const double r1 = o1.x_star / gamma;
  const double r2 = o2.x_star / a_par;
  const bool ok = !o1.multimodal && !o2.multimodal && r1 >= 0.55 && r1 <= 0.65 &&
                  std::abs(o1.c_star - 0.47) <= 0.02 && r2 >= 0.35 && r2 <= 0.45;
  return {ok, "Omega*/gamma = " + num(r1) + " (want [0.55, 0.65]), c* = " + num(o1.c_star) +
                  " (want 0.47 +- 0.02), Delta*/A_par = " + num(r2) + " (want [0.35, 0.45]), c*(Delta) = " +
                  num(o2.c_star)};
}

Verdict regimes() {
  const SweepBase b = regime_base();
  const double gamma = b.drive.gamma;
  const auto traces = regime_traces(regime_omega_grid(), b);
  const auto r = classify_drive_regimes(traces, gamma);
  const bool ok = r.threshold_osc >= 0.45 && r.threshold_osc <= 0.75 && r.threshold_inc >= 1.4 &&
                  r.threshold_inc <= 1.8;
  std::string detail = "threshold_osc = " + num(r.threshold_osc) + " (want [0.45, 0.75]), threshold_inc = " +
                       num(r.threshold_inc) + " (want [1.4, 1.8])";
  if (!ok) {
    detail += "; detector sensitivity (excess, floor -> osc, inc):";
    for (const auto& row : detector_sensitivity(traces, gamma)) {
      detail += " [" + num(row.oscillation_excess) + ", " + num(row.incoherent_floor) + " -> " +
                num(row.threshold_osc) + ", " + num(row.threshold_inc) + "]";
    }
  }
  return {ok, detail};
}

Verdict fig4_structure() {
  const auto axes = fig4_axes();
  const double a_par = PhysicalConstants{}.a_par;
  const double cell_psi = axes[0].span() / static_cast<double>(axes[0].n_points - 1);
  const double cell_d = axes[1].span() / static_cast<double>(axes[1].n_points - 1);

  const auto weak = stable_coherence_map(axes, fig4_base(0.05)).field;
  const double top = *std::max_element(weak.values.begin(), weak.values.end());
  bool near_a = false;
  bool near_b = false;
  bool stray = false;
  for (std::size_t i = 0; i < axes[0].n_points; ++i) {
    for (std::size_t j = 0; j < axes[1].n_points; ++j) {
      if (weak.at(i, j) < top - 1e-9) continue;
      const double psi = axes[0].value(i);
      const double d = axes[1].value(j);
      const bool a = std::abs(psi) <= cell_psi + 1e-12 && std::abs(d) <= cell_d + 1e-12;
      const bool b = std::abs(psi - kPi) <= cell_psi + 1e-12 && std::abs(d + a_par) <= cell_d + 1e-12;
      near_a = near_a || a;
      near_b = near_b || b;
      stray = stray || !(a || b);
    }
  }

  // psi = 0 row at the stronger drive
  const auto strong = stable_coherence_map(axes, fig4_base(0.5)).field;
  std::vector<double> row;
  for (std::size_t j = 0; j < axes[1].n_points; ++j) row.push_back(strong.at(0, j));
  std::vector<double> maxima;
  for (std::size_t j = 1; j + 1 < row.size(); ++j) {
    if (row[j] > row[j - 1] && row[j] >= row[j + 1]) maxima.push_back(axes[1].value(j));
  }
  const bool split = maxima.size() == 2 && std::abs(maxima[0] + maxima[1]) <= cell_d + 1e-12 &&
                     std::abs(maxima[0]) > cell_d;
  std::string where;
  for (double x : maxima) where += " " + num(angular_to_mhz(x));
  return {near_a && near_b && !stray && split,
          "Omega=0.05 MHz: max C = " + num(top) + " at (0,0) " + (near_a ? "yes" : "no") + ", at (pi,-A_par) " +
              (near_b ? "yes" : "no") + ", elsewhere " + (stray ? "yes" : "no") +
              "; Omega=0.5 MHz psi=0 local maxima at Delta/2pi =" + where + " MHz"};
}

Verdict oracle_triangle() {
  qbt::Rng rng(9001);
  const double a_par = PhysicalConstants{}.a_par;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const BatteryNuclear rho0(qbt::random_density_matrix<4>(rng, 1 + trial % 4));
    // drive off: all three apply
    LindbladModel off;
    off.gamma = mhz_to_angular(rng.uniform(0.01, 0.5));
    const TimeGrid g0 = TimeGrid::for_model(0.0, 3.0, 7, off);
    const auto a = integrate(rho0, off, g0);
    const auto b = block_evolve_oracle(rho0, off, g0);
    for (std::size_t i = 0; i < g0.n_samples; ++i) {
      const auto c = storage_closed_form(rho0, off.gamma, a_par, g0.time(i));
      worst = std::max({worst, (a.states[i].matrix() - b.states[i].matrix()).max_abs(),
                        (a.states[i].matrix() - c.matrix()).max_abs(), (b.states[i].matrix() - c.matrix()).max_abs()});
    }
    // driven: integrator vs sector-wise evolution
    LindbladModel on = off;
    on.omega_rabi = mhz_to_angular(rng.uniform(0.05, 1.5));
    on.detuning = mhz_to_angular(rng.uniform(-3.0, 3.0));
    const TimeGrid g1 = TimeGrid::for_model(0.0, 3.0, 7, on);
    const auto x = integrate(rho0, on, g1);
    const auto y = block_evolve_oracle(rho0, on, g1);
    for (std::size_t i = 0; i < g1.n_samples; ++i) {
      worst = std::max(worst, (x.states[i].matrix() - y.states[i].matrix()).max_abs());
    }
  }

  LindbladModel m;
  m.omega_rabi = mhz_to_angular(1.0);
  m.detuning = mhz_to_angular(0.3);
  m.gamma = mhz_to_angular(0.1);
  const auto rho0 = build_initial_state({kPi / 3});
  const auto at = [&](double spp) {
    return integrate(rho0, m, TimeGrid::for_model(0.0, 2.0, 2, m, spp)).states.back().matrix();
  };
  // halving around the default resolution
  const auto s1 = at(kDefaultStepsPerPeriod / 2.0);
  const auto s2 = at(kDefaultStepsPerPeriod);
  const auto s3 = at(kDefaultStepsPerPeriod * 2.0);
  const double e1 = (s1 - s2).max_abs();
  const double e2 = (s2 - s3).max_abs();
  const double ratio = e1 / e2;
  const bool ok = worst <= 1e-8 && e1 <= 1e-8 && e2 <= 1e-8 && std::abs(ratio - 16.0) <= 4.0;
  return {ok, "max pairwise difference = " + num(worst) + " (tol 1e-8), dt halving changes " + num(e1) + ", " +
                  num(e2) + " (tol 1e-8), error ratio = " + num(ratio) + " (want 16 +- 4)"};
}

Verdict invariants() {
  qbt::Rng rng(9002);
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::string first_failure;
  const auto expect = [&](bool ok, const char* what) {
    if (!ok && failures++ == 0) first_failure = what;
  };

  // 1000 random battery states
  for (int trial = 0; trial < 1000; ++trial, ++checked) {
    const Qubit rho(qbt::random_density_matrix<2>(rng, trial % 3 == 0 ? 1 : 2));
    const auto r = ergotropy_decomposition(rho, kHb);
    expect(std::abs(rho.matrix().trace() - 1.0) <= 1e-12, "trace");
    expect(max_asymmetry(rho.matrix()) <= 1e-12, "hermiticity");
    expect(rho.min_eigenvalue() >= -1e-12, "positivity");
    expect(std::abs(r.ergotropy - r.incoherent - r.coherent) <= 1e-12, "W = W_inc + W_coh");
    expect(r.incoherent >= 0.0 && r.incoherent <= r.ergotropy + 1e-12, "0 <= W_inc <= W");
    expect(r.ergotropy <= r.energy + 1e-12, "W <= E");
    if (trial % 3 == 0) expect(std::abs(r.ergotropy - r.energy) <= 1e-10, "pure W = E");
  }

  // 40 random trajectories x 25 samples
  const Matrix4 up = nuclear_up_projector();
  for (int trial = 0; trial < 40; ++trial) {
    LindbladModel m;
    m.omega_rabi = mhz_to_angular(rng.uniform(0.0, 1.5));
    m.detuning = mhz_to_angular(rng.uniform(-3.0, 3.0));
    m.gamma = mhz_to_angular(rng.uniform(0.0, 0.5));
    const BatteryNuclear rho0(qbt::random_density_matrix<4>(rng, 1 + trial % 4));
    const auto traj = integrate(rho0, m, TimeGrid::for_model(0.0, 5.0, 25, m, 200.0));
    const double up0 = (up * rho0.matrix()).trace().real();
    const auto series = energetics_series(traj, kHb);
    for (std::size_t i = 0; i < traj.states.size(); ++i, ++checked) {
      const auto& s = traj.states[i];
      expect(std::abs(s.matrix().trace() - 1.0) <= 1e-9, "trajectory trace");
      expect(max_asymmetry(s.matrix()) <= 1e-10, "trajectory hermiticity");
      expect(s.min_eigenvalue() >= -1e-9, "trajectory positivity");
      expect(std::abs((up * s.matrix()).trace().real() - up0) <= 1e-7, "nuclear population");
      const auto& r = series[i];
      expect(std::abs(r.ergotropy - r.incoherent - r.coherent) <= 1e-12, "trajectory W = W_inc + W_coh");
      expect(r.incoherent >= 0.0 && r.incoherent <= r.ergotropy + 1e-12 && r.ergotropy <= r.energy + 1e-12,
             "trajectory 0 <= W_inc <= W <= E");
    }
  }
  return {failures == 0, std::to_string(checked) + " states checked, " + std::to_string(failures) + " violations" +
                             (failures ? " (first: " + first_failure + ")" : std::string())};
}

Verdict arbitration() {
  const auto r = steady_ergotropy_arbitration();
  const std::string which = r.halved_matches && !r.printed_matches ? "halved form"
                            : r.printed_matches && !r.halved_matches ? "printed form"
                                                                     : "neither uniquely";
  return {r.halved_matches && !r.printed_matches,
          "matches " + which + " over " + std::to_string(r.points.size()) + " points: max dev printed = " +
              num(r.max_dev_printed) + ", halved = " + num(r.max_dev_halved) + " (tol 1e-9)"};
}

struct Criterion {
  const char* title;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"ideal charging closed form", ideal_charging},
      {"steady state", steady_state},
      {"energy scale", energy_scale},
      {"discussion peaks", discussion_peaks},
      {"storage-time enhancement", storage_times},
      {"coherence optima", optima},
      {"regime thresholds", regimes},
      {"stable-coherence map structure", fig4_structure},
      {"oracle triangle", oracle_triangle},
      {"invariant suite", invariants},
      {"steady ergotropy arbitration", arbitration},
  };
  return all;
}

bool run_one(std::size_t n) {
  const auto& c = criteria().at(n - 1);
  Verdict v;
  try {
    v = c.run();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << n << ' ' << c.title << ": " << v.detail << '\n' << std::flush;
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  if (which == "all") {
    bool ok = true;
    for (std::size_t n = 1; n <= criteria().size(); ++n) ok = run_one(n) && ok;
    return ok ? 0 : 1;
  }
  std::size_t n = 0;
  std::istringstream in(which);
  if (!(in >> n) || !in.eof() || n < 1 || n > criteria().size()) {
    std::cerr << "usage: qb_acceptance [1.." << criteria().size() << " | all]\n";
    return 2;
  }
  return run_one(n) ? 0 : 1;
}
