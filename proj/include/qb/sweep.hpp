#pragma once

// Parameter sweeps over drive strength, detuning and nuclear angle, and the
// optimum/regime searches built on them. Grid points are independent and are
// evaluated concurrently; results are always stored by grid index.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qb/lindblad.hpp"
#include "qb/nv_model.hpp"

namespace qb {

enum class AxisName { omega_rabi, delta, psi, time };

std::string_view to_string(AxisName name);
AxisName parse_axis_name(std::string_view text);

// Linear axis; omega_rabi and delta in rad/us, psi in radians, time in us.
struct SweepAxis {
  AxisName name = AxisName::delta;
  double min = 0.0;
  double max = 1.0;
  std::size_t n_points = 2;

  void validate() const;
  double value(std::size_t i) const;
  double span() const { return max - min; }
};

struct SweepField {
  std::vector<SweepAxis> axes;  // one or two; row-major over axes[0], axes[1]
  std::vector<double> values;
  std::string observable;

  void validate() const;
  std::size_t size() const;
  double at(std::size_t i) const { return values.at(i); }
  double at(std::size_t i, std::size_t j) const { return values.at(i * axes.at(1).n_points + j); }
};

struct SweepBase {
  DriveParams drive;
  NuclearInit nuclear;
  double a_par = mhz_to_angular(2.14);
  // Late-time snapshot instead of the t -> infinity steady value.
  std::optional<double> at_time;
  std::size_t audit_points = 5;
  std::uint64_t audit_seed = 0x5eed'c0de'2024ULL;
  double steps_per_period = kDefaultStepsPerPeriod;
};

// Applies one axis coordinate to a copy of the fixed parameters.
SweepBase with_coordinate(SweepBase base, AxisName name, double value);

// Coherence (bits) of the battery's stable state for the given parameters.
double stable_coherence(const SweepBase& point);

struct AuditPoint {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct CoherenceMap {
  SweepField field;
  std::vector<AuditPoint> audit;
  double max_audit_error = 0.0;
};

inline constexpr double kAuditTolerance = 1e-4;

// Throws ErrorCode::NoSteadyState for gamma == 0 and ErrorCode::ValidationFailed
// when an audited point disagrees with long-time integration by > 1e-4 bits.
CoherenceMap stable_coherence_map(std::span<const SweepAxis> axes, const SweepBase& fixed);

// Maximizes f on [lo, hi] to |dx| <= tol.
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

struct LocalMaximum {
  double x = 0.0;
  double c = 0.0;
};

struct CoherenceOptimum {
  double x_star = 0.0;  // NaN when multimodal
  double c_star = 0.0;  // NaN when multimodal
  bool multimodal = false;
  std::vector<LocalMaximum> local_maxima;  // refined, in axis order
};

// Coarse scan on the axis grid, then golden-section refinement of each local
// maximum to 1e-4 of the axis span.
CoherenceOptimum find_coherence_optimum(const SweepAxis& axis, const SweepBase& fixed);

// Charging transient from |g> (x) |psi> under the fixed drive.
struct DriveTrace {
  double omega_rabi = 0.0;
  std::vector<double> t;
  std::vector<double> w_coh;  // units of omega0
  std::vector<double> w_inc;
  std::vector<double> coherence;
  double steady_w_coh = 0.0;
};

DriveTrace drive_trace(const SweepBase& point, double window, std::size_t samples);

struct RegimeDetector {
  double oscillation_excess = 1e-3;  // interior maximum above steady W_coh, units of omega0
  double incoherent_floor = 1e-4;    // max W_inc, units of omega0
  double window_gammas = 20.0;       // trace window in units of 1/gamma
  std::size_t samples = 500;
};

struct RegimeThresholds {
  double threshold_osc = 0.0;  // Omega/gamma; NaN if never triggered
  double threshold_inc = 0.0;
  std::vector<double> omega_over_gamma;
  std::vector<bool> oscillates;
  std::vector<bool> incoherent;
};

RegimeThresholds classify_traces(std::span<const DriveTrace> traces, double gamma,
                                 const RegimeDetector& detector);

// One trace per Omega grid point over detector.window_gammas / gamma.
// Throws ErrorCode::InvalidArgument if the grid does not span [0.2, 3] gamma.
std::vector<DriveTrace> regime_traces(const SweepAxis& omega_grid, const SweepBase& fixed,
                                      const RegimeDetector& detector = {});

// Throws ErrorCode::InvalidArgument if a classification change straddles a gap
// wider than 0.1 in Omega/gamma.
RegimeThresholds classify_drive_regimes(const SweepAxis& omega_grid, const SweepBase& fixed,
                                        const RegimeDetector& detector = {});
RegimeThresholds classify_drive_regimes(std::span<const DriveTrace> traces, double gamma,
                                        const RegimeDetector& detector = {});

struct SensitivityRow {
  double oscillation_excess = 0.0;
  double incoherent_floor = 0.0;
  double threshold_osc = 0.0;
  double threshold_inc = 0.0;
};

// Thresholds under a range of detector levels (traces computed once).
std::vector<SensitivityRow> detector_sensitivity(const SweepAxis& omega_grid, const SweepBase& fixed,
                                                 const RegimeDetector& base = {});
std::vector<SensitivityRow> detector_sensitivity(std::span<const DriveTrace> traces, double gamma,
                                                 const RegimeDetector& base = {});

struct TransientMaps {
  SweepField w_coh;             // axes: (parameter, time)
  SweepField w_inc;             // axes: (parameter, time)
  SweepField stable_coherence;  // axis: parameter
};

TransientMaps transient_maps(const SweepAxis& axis, const SweepBase& fixed, double window,
                             std::size_t samples = 500);

// Runs fn(i) for i in [0, n) across hardware threads; rethrows the first error.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qb
