#include "qb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "qb/energetics.hpp"

namespace qb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

LindbladModel model_for(const SweepBase& p) {
  return LindbladModel{p.drive.detuning, p.drive.omega_rabi, p.drive.gamma, p.a_par};
}

std::vector<double> evaluate_all(std::size_t n, const std::function<double(std::size_t)>& f) {
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

double first_flagged(const std::vector<double>& x, const std::vector<bool>& flags) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (flags[i]) return x[i];
  return kNaN;
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string_view to_string(AxisName name) {
  switch (name) {
    case AxisName::omega_rabi: return "omega_rabi";
    case AxisName::delta: return "delta";
    case AxisName::psi: return "psi";
    case AxisName::time: return "time";
  }
  return "unknown";
}

AxisName parse_axis_name(std::string_view text) {
  if (text == "omega_rabi" || text == "omega") return AxisName::omega_rabi;
  if (text == "delta") return AxisName::delta;
  if (text == "psi") return AxisName::psi;
  if (text == "time") return AxisName::time;
  throw Error(ErrorCode::InvalidArgument,
              "unknown sweep axis '" + std::string(text) + "' (expected omega, delta or psi)");
}

void SweepAxis::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(name)) + " axis needs min < max (got " + fmt(min) + ", " +
                    fmt(max) + ")");
  }
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "sweep axis needs at least 2 points");
  if (name == AxisName::omega_rabi && min < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "Rabi-frequency axis must be >= 0");
  }
  if (name == AxisName::psi && (min < 0.0 || max > std::numbers::pi + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "psi axis must lie within [0, pi]");
  }
}

double SweepAxis::value(std::size_t i) const {
  if (i + 1 == n_points) return max;
  return min + span() * static_cast<double>(i) / static_cast<double>(n_points - 1);
}

std::size_t SweepField::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.n_points;
  return n;
}

void SweepField::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw Error(ErrorCode::InvalidArgument, "sweep field needs one or two axes");
  }
  for (const auto& a : axes) a.validate();
  if (values.size() != size()) {
    throw Error(ErrorCode::InvalidArgument, "sweep field value count does not match its axes");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "sweep field has non-finite values");
}

SweepBase with_coordinate(SweepBase base, AxisName name, double value) {
  switch (name) {
    case AxisName::omega_rabi: base.drive.omega_rabi = value; break;
    case AxisName::delta: base.drive.detuning = value; break;
    case AxisName::psi: base.nuclear.psi = std::clamp(value, 0.0, std::numbers::pi); break;
    case AxisName::time: base.at_time = value; break;
  }
  return base;
}

double stable_coherence(const SweepBase& p) {
  const BatteryHamiltonian hb(1.0);
  if (p.at_time) {
    const LindbladModel model = model_for(p);
    const TimeGrid grid = TimeGrid::for_model(0.0, *p.at_time, 2, model, p.steps_per_period);
    const Trajectory traj = integrate(build_initial_state(p.nuclear), model, grid);
    return energetics_series(traj, hb).back().coherence;
  }
  return coherence_bits(
      steady_state_reduced(p.nuclear, p.drive.detuning, p.drive.omega_rabi, p.drive.gamma, p.a_par), hb);
}

CoherenceMap stable_coherence_map(std::span<const SweepAxis> axes, const SweepBase& fixed) {
  if (!(fixed.drive.gamma > 0.0)) {
    throw Error(ErrorCode::NoSteadyState, "stable coherence needs a decay rate gamma > 0");
  }
  CoherenceMap map;
  map.field.axes.assign(axes.begin(), axes.end());
  map.field.observable = fixed.at_time ? "coherence_at_time" : "stable_coherence";
  if (map.field.axes.empty() || map.field.axes.size() > 2) {
    throw Error(ErrorCode::InvalidArgument, "coherence map needs one or two axes");
  }
  for (const auto& a : map.field.axes) {
    a.validate();
    if (a.name == AxisName::time) throw Error(ErrorCode::InvalidArgument, "time is not a map axis");
  }

  const std::size_t inner = map.field.axes.size() == 2 ? map.field.axes[1].n_points : 1;
  const auto point_at = [&](std::size_t k) {
    SweepBase p = with_coordinate(fixed, map.field.axes[0].name, map.field.axes[0].value(k / inner));
    if (map.field.axes.size() == 2) {
      p = with_coordinate(p, map.field.axes[1].name, map.field.axes[1].value(k % inner));
    }
    return p;
  };

  map.field.values = evaluate_all(map.field.size(), [&](std::size_t k) { return stable_coherence(point_at(k)); });
  map.field.validate();

  if (fixed.at_time || fixed.audit_points == 0) return map;

  std::vector<std::size_t> order(map.field.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(fixed.audit_seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min(fixed.audit_points, order.size()));
  std::sort(order.begin(), order.end());

  map.audit.resize(order.size());
  parallel_for(order.size(), [&](std::size_t a) {
    const SweepBase p = point_at(order[a]);
    const auto steady = integrate_to_steady(build_initial_state(p.nuclear), model_for(p));
    const double numeric = coherence_bits(partial_trace_nuclear(steady.state), BatteryHamiltonian(1.0));
    map.audit[a] = AuditPoint{order[a], map.field.values[order[a]], numeric};
  });
  for (const auto& a : map.audit) {
    map.max_audit_error = std::max(map.max_audit_error, std::abs(a.analytic - a.numeric));
  }
  if (map.max_audit_error > kAuditTolerance) {
    throw Error(ErrorCode::ValidationFailed,
                "steady-state coherence disagrees with long-time integration by " +
                    fmt(map.max_audit_error) + " bits");
  }
  return map;
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

CoherenceOptimum find_coherence_optimum(const SweepAxis& axis, const SweepBase& fixed) {
  axis.validate();
  if (axis.name == AxisName::time) throw Error(ErrorCode::InvalidArgument, "cannot optimize over time");
  if (!(fixed.drive.gamma > 0.0)) {
    throw Error(ErrorCode::NoSteadyState, "stable coherence needs a decay rate gamma > 0");
  }
  const auto f = [&](double x) { return stable_coherence(with_coordinate(fixed, axis.name, x)); };
  const std::size_t n = axis.n_points;
  const std::vector<double> coarse = evaluate_all(n, [&](std::size_t i) { return f(axis.value(i)); });

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool above_left = i == 0 || coarse[i] > coarse[i - 1];
    const bool above_right = i + 1 == n ? coarse[i] > coarse[i - 1] : coarse[i] >= coarse[i + 1];
    if (i == 0 && !(coarse[0] > coarse[1])) continue;
    if (above_left && above_right) peaks.push_back(i);
  }

  CoherenceOptimum opt;
  const double tol = 1e-4 * axis.span();
  for (std::size_t i : peaks) {
    const double lo = axis.value(i == 0 ? 0 : i - 1);
    const double hi = axis.value(std::min(i + 1, n - 1));
    const double x = golden_section_maximize(f, lo, hi, tol);
    opt.local_maxima.push_back(LocalMaximum{x, f(x)});
  }
  opt.multimodal = opt.local_maxima.size() > 1;
  if (opt.local_maxima.size() == 1) {
    opt.x_star = opt.local_maxima.front().x;
    opt.c_star = opt.local_maxima.front().c;
  } else {
    opt.x_star = kNaN;
    opt.c_star = kNaN;
  }
  return opt;
}

DriveTrace drive_trace(const SweepBase& point, double window, std::size_t samples) {
  const LindbladModel model = model_for(point);
  const TimeGrid grid = TimeGrid::for_model(0.0, window, samples, model, point.steps_per_period);
  const auto series = energetics_series(integrate(build_initial_state(point.nuclear), model, grid),
                                        BatteryHamiltonian(1.0));
  DriveTrace trace;
  trace.omega_rabi = point.drive.omega_rabi;
  trace.t.reserve(samples);
  for (const auto& r : series) {
    trace.t.push_back(r.t);
    trace.w_coh.push_back(r.coherent);
    trace.w_inc.push_back(r.incoherent);
    trace.coherence.push_back(r.coherence);
  }
  trace.steady_w_coh =
      ergotropy_decomposition(steady_state_reduced(point.nuclear, point.drive.detuning,
                                                   point.drive.omega_rabi, point.drive.gamma,
                                                   point.a_par),
                              BatteryHamiltonian(1.0))
          .coherent;
  return trace;
}

RegimeThresholds classify_traces(std::span<const DriveTrace> traces, double gamma,
                                 const RegimeDetector& detector) {
  RegimeThresholds out;
  for (const auto& tr : traces) {
    out.omega_over_gamma.push_back(tr.omega_rabi / gamma);
    bool osc = false;
    for (std::size_t i = 1; i + 1 < tr.w_coh.size() && !osc; ++i) {
      osc = tr.w_coh[i] >= tr.w_coh[i - 1] && tr.w_coh[i] >= tr.w_coh[i + 1] &&
            tr.w_coh[i] > tr.steady_w_coh + detector.oscillation_excess;
    }
    const double max_inc = tr.w_inc.empty() ? 0.0 : *std::max_element(tr.w_inc.begin(), tr.w_inc.end());
    out.oscillates.push_back(osc);
    out.incoherent.push_back(max_inc > detector.incoherent_floor);
  }
  out.threshold_osc = first_flagged(out.omega_over_gamma, out.oscillates);
  out.threshold_inc = first_flagged(out.omega_over_gamma, out.incoherent);
  return out;
}

std::vector<DriveTrace> regime_traces(const SweepAxis& omega_grid, const SweepBase& fixed,
                                      const RegimeDetector& detector) {
  omega_grid.validate();
  if (omega_grid.name != AxisName::omega_rabi) {
    throw Error(ErrorCode::InvalidArgument, "regime classification needs a Rabi-frequency axis");
  }
  const double gamma = fixed.drive.gamma;
  if (!(gamma > 0.0)) throw Error(ErrorCode::NoSteadyState, "regime classification needs gamma > 0");
  if (omega_grid.min > 0.2 * gamma * (1.0 + 1e-9) || omega_grid.max < 3.0 * gamma * (1.0 - 1e-9)) {
    throw Error(ErrorCode::InvalidArgument,
                "regime grid must span at least [0.2, 3] * gamma in Rabi frequency");
  }
  std::vector<DriveTrace> traces(omega_grid.n_points);
  const double window = detector.window_gammas / gamma;
  parallel_for(traces.size(), [&](std::size_t i) {
    traces[i] = drive_trace(with_coordinate(fixed, AxisName::omega_rabi, omega_grid.value(i)), window,
                            detector.samples);
  });
  return traces;
}

RegimeThresholds classify_drive_regimes(const SweepAxis& omega_grid, const SweepBase& fixed,
                                        const RegimeDetector& detector) {
  return classify_drive_regimes(regime_traces(omega_grid, fixed, detector), fixed.drive.gamma, detector);
}

RegimeThresholds classify_drive_regimes(std::span<const DriveTrace> traces, double gamma,
                                        const RegimeDetector& detector) {
  RegimeThresholds out = classify_traces(traces, gamma, detector);
  for (std::size_t i = 1; i < traces.size(); ++i) {
    const bool changed = out.oscillates[i] != out.oscillates[i - 1] ||
                         out.incoherent[i] != out.incoherent[i - 1];
    const double gap = out.omega_over_gamma[i] - out.omega_over_gamma[i - 1];
    if (changed && gap > 0.1) {
      throw Error(ErrorCode::InvalidArgument,
                  "regime grid too coarse: classification changes across a gap of " + fmt(gap) +
                      " in Omega/gamma near " + fmt(out.omega_over_gamma[i]) + "; refine the grid");
    }
  }
  return out;
}

std::vector<SensitivityRow> detector_sensitivity(const SweepAxis& omega_grid, const SweepBase& fixed,
                                                 const RegimeDetector& base) {
  return detector_sensitivity(regime_traces(omega_grid, fixed, base), fixed.drive.gamma, base);
}

std::vector<SensitivityRow> detector_sensitivity(std::span<const DriveTrace> traces, double gamma,
                                                 const RegimeDetector& base) {
  std::vector<SensitivityRow> rows;
  for (double osc : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
    for (double inc : {1e-5, 1e-4, 1e-3}) {
      RegimeDetector d = base;
      d.oscillation_excess = osc;
      d.incoherent_floor = inc;
      const auto r = classify_traces(traces, gamma, d);
      rows.push_back(SensitivityRow{osc, inc, r.threshold_osc, r.threshold_inc});
    }
  }
  return rows;
}

TransientMaps transient_maps(const SweepAxis& axis, const SweepBase& fixed, double window,
                             std::size_t samples) {
  axis.validate();
  const SweepAxis time_axis{AxisName::time, 0.0, window, samples};
  time_axis.validate();
  std::vector<DriveTrace> traces(axis.n_points);
  parallel_for(traces.size(), [&](std::size_t i) {
    traces[i] = drive_trace(with_coordinate(fixed, axis.name, axis.value(i)), window, samples);
  });

  TransientMaps maps;
  maps.w_coh = SweepField{{axis, time_axis}, {}, "W_coh(t)"};
  maps.w_inc = SweepField{{axis, time_axis}, {}, "W_inc(t)"};
  maps.stable_coherence = SweepField{{axis}, {}, "stable_coherence"};
  for (std::size_t i = 0; i < traces.size(); ++i) {
    maps.w_coh.values.insert(maps.w_coh.values.end(), traces[i].w_coh.begin(), traces[i].w_coh.end());
    maps.w_inc.values.insert(maps.w_inc.values.end(), traces[i].w_inc.begin(), traces[i].w_inc.end());
    maps.stable_coherence.values.push_back(
        stable_coherence(with_coordinate(fixed, axis.name, axis.value(i))));
  }
  return maps;
}

}  // namespace qb
