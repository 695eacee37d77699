#include "qb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qb/config.hpp"
#include "qb/report.hpp"
#include "qb/reproduce.hpp"

namespace qb {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return kExitConfig;
    case ErrorCode::InvalidArgument: return kExitInvalidArgument;
    case ErrorCode::NoSteadyState: return kExitNoSteadyState;
    case ErrorCode::ValidationFailed: return kExitValidation;
    case ErrorCode::Io: return kExitIo;
    case ErrorCode::InvalidState: return kExitInvalidState;
    case ErrorCode::NotHermitian: return kExitNotHermitian;
  }
  return kExitUnexpected;
}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string dashed(std::string_view key) {
  std::string s(key);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

// Config-key flags live on the top-level app; subcommands fall through to it.
struct ConfigFlags {
  std::map<std::string, std::string, std::less<>> values;
  std::map<std::string, CLI::Option*, std::less<>> options;
  std::string config_path;

  void attach(CLI::App& app) {
    for (std::string_view key : config_keys()) {
      const std::string k(key);
      options[k] = app.add_option("--" + dashed(key), values[k], "config key " + k);
    }
    app.add_option("--config", config_path, "flat key=value file, applied before flags");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (std::string_view key : config_keys()) {
      if (options.find(key)->second->count() > 0) apply_config_value(cfg, key, values.find(key)->second);
    }
    return cfg;
  }
};

// Data goes to --output when given, otherwise stdout; the one-line summary
// then goes to whichever stream is not carrying data.
class Output {
 public:
  Output(const std::string& path, std::ostream& out, std::ostream& err) {
    if (path.empty()) {
      data_ = &out;
      summary_ = &err;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorCode::Io, "cannot write " + path);
      data_ = file_.get();
      summary_ = &out;
    }
  }

  std::ostream& data() { return *data_; }
  std::ostream& summary() { return *summary_; }

  void finish(const std::string& path) {
    if (file_) {
      file_->flush();
      if (!*file_) throw Error(ErrorCode::Io, "write failed: " + path);
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* data_ = nullptr;
  std::ostream* summary_ = nullptr;
};

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig12(v);
}

std::string fmt(double v) { return format_number(round_sig12(v)); }

SweepAxis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) {
    throw Error(ErrorCode::InvalidArgument, "axis '" + text + "': expected name:min:max:n");
  }
  SweepAxis axis;
  axis.name = parse_axis_name(parts[0]);
  try {
    std::size_t used = 0;
    axis.min = axis_from_user(axis.name, std::stod(parts[1], &used));
    axis.max = axis_from_user(axis.name, std::stod(parts[2], &used));
    const long n = std::stol(parts[3], &used);
    if (n < 0 || used != parts[3].size()) throw std::invalid_argument("n");
    axis.n_points = static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "axis '" + text + "': malformed number");
  }
  axis.validate();
  return axis;
}

SweepBase sweep_base(const RunConfig& cfg) {
  SweepBase base;
  base.drive = cfg.drive;
  base.nuclear = cfg.nuclear;
  base.a_par = cfg.constants.a_par;
  return base;
}

struct SeriesSummary {
  double peak_w = 0.0;
  double peak_t = 0.0;
};

SeriesSummary peak_w(std::span<const EnergeticsRecord> a, std::span<const EnergeticsRecord> b = {}) {
  SeriesSummary s;
  for (auto part : {a, b}) {
    for (const auto& r : part) {
      if (r.ergotropy > s.peak_w) {
        s.peak_w = r.ergotropy;
        s.peak_t = r.t;
      }
    }
  }
  return s;
}

// Storage time, or a reason it is not available.
std::pair<std::optional<double>, std::string> try_storage_time(std::span<const EnergeticsRecord> storage,
                                                               double epsilon) {
  if (storage.size() < 2) return {std::nullopt, "no storage stage"};
  try {
    return {storage_time(storage, epsilon), ""};
  } catch (const Error& e) {
    return {std::nullopt, e.what()};
  }
}

void write_two_stage(std::ostream& out, const ProtocolResult& res, double scale, OutputFormat format) {
  const std::span<const EnergeticsRecord> storage_rest =
      res.storage.size() > 1 ? std::span<const EnergeticsRecord>(res.storage).subspan(1)
                             : std::span<const EnergeticsRecord>();
  if (format == OutputFormat::csv) {
    write_series_header(out, true);
    write_series_csv(out, res.charging, scale, "charging");
    write_series_csv(out, storage_rest, scale, "storage");
    return;
  }
  json j;
  j["charging"] = json::array();
  for (const auto& r : res.charging) j["charging"].push_back(record_json(r, scale));
  j["storage"] = json::array();
  for (const auto& r : res.storage) j["storage"].push_back(record_json(r, scale));
  j["t_handoff_us"] = number(res.t_handoff);
  write_json(out, j);
}

// ---- simulate ----

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ProtocolSpec spec = cfg.protocol();
  const ProtocolResult res = run_two_stage(spec);
  Output sink(cfg.output, out, err);
  write_two_stage(sink.data(), res, cfg.energy_scale(), cfg.format.value_or(OutputFormat::csv));
  sink.finish(cfg.output);

  const auto peak = peak_w(res.charging, res.storage);
  const auto [t_star, why] = try_storage_time(res.storage, cfg.epsilon);
  sink.summary() << "simulate: peak W = " << fmt(peak.peak_w * cfg.energy_scale()) << ' '
                 << cfg.energy_unit_name() << " at t = " << fmt(peak.peak_t) << " us; t* = "
                 << (t_star ? fmt(*t_star) + " us" : "n/a (" + why + ")") << " at epsilon = "
                 << fmt(cfg.epsilon) << '\n';
  return kExitOk;
}

// ---- steady ----

int cmd_steady(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.drive.validate();
  cfg.nuclear.validate();
  const Qubit rho = steady_state_reduced(cfg.nuclear, cfg.drive.detuning, cfg.drive.omega_rabi,
                                         cfg.drive.gamma, cfg.constants.a_par);
  const EnergeticsRecord rec = ergotropy_decomposition(rho, BatteryHamiltonian(1.0));
  const double scale = cfg.energy_scale();

  Output sink(cfg.output, out, err);
  if (cfg.format.value_or(OutputFormat::json) == OutputFormat::json) {
    json j = record_json(rec, scale);
    j.erase("t_us");
    j["units"] = std::string(cfg.energy_unit_name());
    write_json(sink.data(), j);
  } else {
    CsvWriter csv(sink.data());
    csv.row({"p_e", "E", "W", "Wi", "Wc", "C", "ratio_coh"});
    csv.row({format_number(round_sig12(rho(basis::excited, basis::excited).real())),
             format_number(round_sig12(rec.energy * scale)), format_number(round_sig12(rec.ergotropy * scale)),
             format_number(round_sig12(rec.incoherent * scale)),
             format_number(round_sig12(rec.coherent * scale)), format_number(round_sig12(rec.coherence)),
             rec.ratio_coh ? format_number(round_sig12(*rec.ratio_coh)) : ""});
  }
  sink.finish(cfg.output);
  sink.summary() << "steady: p_e = " << fmt(rho(basis::excited, basis::excited).real()) << ", W = "
                 << fmt(rec.ergotropy * scale) << ' ' << cfg.energy_unit_name() << ", C = "
                 << fmt(rec.coherence) << " bits, ratio_coh = "
                 << (rec.ratio_coh ? fmt(*rec.ratio_coh) : std::string("n/a")) << '\n';
  return kExitOk;
}

// ---- sweep ----

void emit_field(std::ostream& out, const SweepField& field, OutputFormat format) {
  if (format == OutputFormat::csv) {
    write_sweep_csv(out, field);
  } else {
    write_json(out, sweep_json(field));
  }
}

std::string describe_max(const SweepField& field) {
  const auto it = std::max_element(field.values.begin(), field.values.end());
  const std::size_t k = static_cast<std::size_t>(it - field.values.begin());
  const std::size_t inner = field.axes.size() == 2 ? field.axes[1].n_points : 1;
  std::string s = "max " + field.observable + " = " + fmt(*it) + " at " + axis_column(field.axes[0].name) +
                  " = " + fmt(axis_to_user(field.axes[0].name, field.axes[0].value(k / inner)));
  if (field.axes.size() == 2) {
    s += ", " + axis_column(field.axes[1].name) + " = " +
         fmt(axis_to_user(field.axes[1].name, field.axes[1].value(k % inner)));
  }
  return s;
}

struct SweepOptions {
  std::vector<std::string> axes;
  std::string observable = "stable_coherence";
  std::optional<double> at_time;
  double window = 0.0;
  std::size_t samples = kFig3Samples;
};

int cmd_sweep(const RunConfig& cfg, const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<SweepAxis> axes;
  for (const auto& a : opt.axes) axes.push_back(parse_axis(a));
  SweepBase base = sweep_base(cfg);
  base.at_time = opt.at_time;

  SweepField field;
  if (opt.observable == "stable_coherence") {
    if (axes.empty() || axes.size() > 2) {
      throw Error(ErrorCode::InvalidArgument, "stable_coherence sweeps take one or two --axis");
    }
    field = stable_coherence_map(axes, base).field;
  } else if (opt.observable == "w_coh" || opt.observable == "w_inc") {
    if (axes.size() != 1) {
      throw Error(ErrorCode::InvalidArgument, opt.observable + " sweeps take exactly one --axis (time is added)");
    }
    if (!(cfg.drive.gamma > 0.0) && !(opt.window > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "transient sweeps need --window when gamma = 0");
    }
    const double window = opt.window > 0.0 ? opt.window : 20.0 / cfg.drive.gamma;
    TransientMaps maps = transient_maps(axes[0], base, window, opt.samples);
    field = opt.observable == "w_coh" ? std::move(maps.w_coh) : std::move(maps.w_inc);
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "unknown observable '" + opt.observable + "' (stable_coherence, w_coh, w_inc)");
  }

  Output sink(cfg.output, out, err);
  emit_field(sink.data(), field, cfg.format.value_or(OutputFormat::csv));
  sink.finish(cfg.output);
  sink.summary() << "sweep: " << describe_max(field) << '\n';
  return kExitOk;
}

// ---- optimize ----

json optimum_json(const CoherenceOptimum& opt, AxisName name) {
  json j;
  j["axis"] = std::string(to_string(name));
  j["column"] = axis_column(name);
  j["multimodal"] = opt.multimodal;
  j["x_star"] = number(axis_to_user(name, opt.x_star));
  j["c_star"] = number(opt.c_star);
  j["local_maxima"] = json::array();
  for (const auto& m : opt.local_maxima) {
    j["local_maxima"].push_back({{"x", number(axis_to_user(name, m.x))}, {"c", number(m.c)}});
  }
  return j;
}

int cmd_optimize(const RunConfig& cfg, const std::string& axis_text, std::ostream& out, std::ostream& err) {
  const SweepAxis axis = parse_axis(axis_text);
  const CoherenceOptimum opt = find_coherence_optimum(axis, sweep_base(cfg));
  json j = optimum_json(opt, axis.name);
  if (cfg.drive.gamma > 0.0 && axis.name == AxisName::omega_rabi) {
    j["x_star_over_gamma"] = number(opt.x_star / cfg.drive.gamma);
  }
  if (axis.name == AxisName::delta) j["x_star_over_a_par"] = number(opt.x_star / cfg.constants.a_par);

  Output sink(cfg.output, out, err);
  write_json(sink.data(), j);
  sink.finish(cfg.output);
  if (opt.multimodal) {
    sink.summary() << "optimize: multimodal window, " << opt.local_maxima.size() << " local maxima\n";
  } else {
    sink.summary() << "optimize: " << axis_column(axis.name) << "* = " << fmt(axis_to_user(axis.name, opt.x_star))
                   << ", C* = " << fmt(opt.c_star) << " bits\n";
  }
  return kExitOk;
}

// ---- reproduce ----

class Reproducer {
 public:
  Reproducer(const RunConfig& cfg, fs::path dir, std::ostream& log) : cfg_(cfg), dir_(std::move(dir)), log_(log) {}

  void run(const std::string& target) {
    if (target == "all") {
      for (const char* t : {"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig3a", "fig3b", "fig3c", "fig3d",
                            "fig4a", "fig4b", "regimes", "discussion", "arbitration"}) {
        run(t);
      }
      return;
    }
    if (target.size() == 5 && target.rfind("fig2", 0) == 0 && target[4] >= 'a' && target[4] <= 'd') {
      fig2(target[4]);
    } else if (target == "fig2e") {
      fig2e();
    } else if (target == "fig3a" || target == "fig3c") {
      fig3(AxisName::omega_rabi, target);
    } else if (target == "fig3b" || target == "fig3d") {
      fig3(AxisName::delta, target);
    } else if (target == "fig4a" || target == "fig4b") {
      fig4(target == "fig4a" ? 0.05 : 0.5, target);
    } else if (target == "regimes") {
      regimes();
    } else if (target == "discussion") {
      discussion();
    } else if (target == "arbitration") {
      arbitration();
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown reproduce target '" + target + "'");
    }
  }

 private:
  OutputFormat format() const { return cfg_.format.value_or(OutputFormat::csv); }
  const char* ext() const { return format() == OutputFormat::csv ? ".csv" : ".json"; }

  std::ofstream open(const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
    return f;
  }

  void close(std::ofstream& f, const std::string& name) {
    f.flush();
    if (!f) throw Error(ErrorCode::Io, "write failed: " + (dir_ / name).string());
  }

  void fig2(char panel) {
    const std::string name = std::string("fig2") + panel + ext();
    const ProtocolSpec spec = fig2_protocol(panel);
    const ProtocolResult res = run_two_stage(spec);
    auto f = open(name);
    const double scale = cfg_.energy_scale();
    if (panel == 'a' || panel == 'b') {
      if (format() == OutputFormat::csv) {
        write_series_header(f, false);
        write_series_csv(f, res.charging, scale);
      } else {
        json j = json::array();
        for (const auto& r : res.charging) j.push_back(record_json(r, scale));
        write_json(f, j);
      }
    } else {
      write_two_stage(f, res, scale, format());
    }
    close(f, name);
    const auto peak = peak_w(res.charging, res.storage);
    log_ << name << ": peak W = " << fmt(peak.peak_w * scale) << ' ' << cfg_.energy_unit_name()
         << " at t = " << fmt(peak.peak_t) << " us";
    if (panel == 'c' || panel == 'd') {
      const auto [t_star, why] = try_storage_time(res.storage, cfg_.epsilon);
      log_ << "; t* = " << (t_star ? fmt(*t_star) + " us" : "n/a (" + why + ")");
    }
    log_ << '\n';
  }

  void fig2e() {
    const std::string name = std::string("fig2e") + ext();
    auto f = open(name);
    const double scale = cfg_.energy_scale();
    json j = json::array();
    if (format() == OutputFormat::csv) {
      CsvWriter(f).row({"psi_rad", "stage", "t_us", "E", "W", "Wi", "Wc", "C", "ratio_coh"});
    }
    log_ << name << ":";
    for (double psi : kFig2ePsi) {
      ProtocolSpec spec = fig2_protocol('d');
      spec.nuclear.psi = psi;
      const ProtocolResult res = run_two_stage(spec);
      if (format() == OutputFormat::csv) {
        std::ostringstream rows;
        write_series_csv(rows, res.charging, scale, "charging");
        write_series_csv(rows, std::span<const EnergeticsRecord>(res.storage).subspan(1), scale, "storage");
        std::istringstream lines(rows.str());
        for (std::string line; std::getline(lines, line);) f << format_number(psi) << ',' << line << '\n';
      } else {
        json run;
        run["psi_rad"] = number(psi);
        run["storage"] = json::array();
        for (const auto& r : res.storage) run["storage"].push_back(record_json(r, scale));
        j.push_back(run);
      }
      const auto [t_star, why] = try_storage_time(res.storage, cfg_.epsilon);
      log_ << " psi = " << fmt(psi) << " t* = " << (t_star ? fmt(*t_star) + " us" : "n/a") << ';';
    }
    if (format() == OutputFormat::json) write_json(f, j);
    close(f, name);
    log_ << '\n';
  }

  const TransientMaps& maps_for(AxisName swept) {
    auto it = fig3_cache_.find(swept);
    if (it == fig3_cache_.end()) {
      it = fig3_cache_.emplace(swept, transient_maps(fig3_axis(swept), fig3_base(swept), fig3_window(), kFig3Samples))
               .first;
    }
    return it->second;
  }

  void fig3(AxisName swept, const std::string& target) {
    const TransientMaps& maps = maps_for(swept);
    const bool coherent = target == "fig3a" || target == "fig3b";
    const SweepField& field = coherent ? maps.w_coh : maps.w_inc;
    const std::string name = target + ext();
    auto f = open(name);
    emit_field(f, field, format());
    close(f, name);
    log_ << name << ": " << describe_max(field) << '\n';
    if (coherent) {
      const std::string overlay = target + "_overlay" + ext();
      auto g = open(overlay);
      emit_field(g, maps.stable_coherence, format());
      close(g, overlay);
      log_ << overlay << ": " << describe_max(maps.stable_coherence) << '\n';
    }
  }

  void fig4(double omega_mhz, const std::string& target) {
    const auto axes = fig4_axes();
    const CoherenceMap map = stable_coherence_map(axes, fig4_base(omega_mhz));
    const std::string name = target + ext();
    auto f = open(name);
    emit_field(f, map.field, format());
    close(f, name);
    log_ << name << ": " << describe_max(map.field) << "; audit max error = " << fmt(map.max_audit_error)
         << '\n';
  }

  void regimes() {
    const SweepAxis grid = regime_omega_grid();
    const SweepBase base = regime_base();
    const RegimeDetector det;
    const auto traces = regime_traces(grid, base, det);
    const RegimeThresholds th = classify_drive_regimes(traces, base.drive.gamma, det);
    const auto sens = detector_sensitivity(traces, base.drive.gamma, det);
    json j;
    j["detector"] = {{"oscillation_excess_w0", number(det.oscillation_excess)},
                     {"incoherent_floor_w0", number(det.incoherent_floor)},
                     {"window_over_gamma", number(det.window_gammas)},
                     {"samples", det.samples}};
    j["threshold_osc"] = number(th.threshold_osc);
    j["threshold_inc"] = number(th.threshold_inc);
    j["sensitivity"] = json::array();
    for (const auto& row : sens) {
      j["sensitivity"].push_back({{"oscillation_excess_w0", number(row.oscillation_excess)},
                                  {"incoherent_floor_w0", number(row.incoherent_floor)},
                                  {"threshold_osc", number(row.threshold_osc)},
                                  {"threshold_inc", number(row.threshold_inc)}});
    }
    auto f = open("regimes.json");
    write_json(f, j);
    close(f, "regimes.json");
    log_ << "regimes.json: threshold_osc = " << fmt(th.threshold_osc) << ", threshold_inc = " << fmt(th.threshold_inc)
         << " (Omega/gamma)\n";
  }

  void discussion() {
    const DiscussionReport rep = discussion_report(cfg_.epsilon);
    const double uev = rep.omega0_uev;
    json j;
    j["epsilon"] = number(rep.epsilon);
    j["omega0_ueV"] = number(uev);
    j["incoherent_peak"] = {{"W_inc_w0", number(rep.incoherent_peak)},
                            {"W_inc_ueV", number(rep.incoherent_peak * uev)},
                            {"t_us", number(rep.incoherent_peak_time)}};
    j["coherent_peak"] = {{"W_coh_w0", number(rep.coherent_peak)},
                          {"W_coh_ueV", number(rep.coherent_peak * uev)},
                          {"t_us", number(rep.coherent_peak_time)},
                          {"ratio_coh", number(rep.coherent_peak_ratio)}};
    j["free_drive_coherent_peak"] = {{"W_coh_w0", number(rep.free_coherent_peak)},
                                     {"t_us", number(rep.free_coherent_peak_time)},
                                     {"ratio_coh", number(rep.free_coherent_peak_ratio)}};
    j["t_star_full_us"] = number(rep.t_star_full_ideal);
    j["t_star_half_us"] = number(rep.t_star_half_ideal);
    j["ratio"] = number(rep.ratio_ideal);
    j["pipeline"] = {{"t_star_full_us", number(rep.t_star_full_pipeline)},
                     {"t_star_half_us", number(rep.t_star_half_pipeline)},
                     {"ratio", number(rep.ratio_pipeline)}};
    auto f = open("discussion.json");
    write_json(f, j);
    close(f, "discussion.json");
    log_ << "discussion.json: t*_full = " << fmt(rep.t_star_full_ideal) << " us, t*_half = "
         << fmt(rep.t_star_half_ideal) << " us, ratio = " << fmt(rep.ratio_ideal) << " (pipeline ratio "
         << fmt(rep.ratio_pipeline) << ")\n";
  }

  void arbitration() {
    const ArbitrationReport rep = steady_ergotropy_arbitration();
    json j;
    j["max_dev_printed"] = number(rep.max_dev_printed);
    j["max_dev_halved"] = number(rep.max_dev_halved);
    j["printed_matches"] = rep.printed_matches;
    j["halved_matches"] = rep.halved_matches;
    j["points"] = json::array();
    for (const auto& p : rep.points) {
      j["points"].push_back({{"delta_mhz", number(angular_to_mhz(p.detuning))},
                             {"omega_mhz", number(angular_to_mhz(p.omega_rabi))},
                             {"gamma_mhz", number(angular_to_mhz(p.gamma))},
                             {"numeric", number(p.numeric)},
                             {"printed", number(p.printed)},
                             {"halved", number(p.halved)}});
    }
    auto f = open("arbitration.json");
    write_json(f, j);
    close(f, "arbitration.json");
    log_ << "arbitration.json: matches "
         << (rep.halved_matches ? "halved" : rep.printed_matches ? "printed" : "neither") << " form\n";
  }

  const RunConfig& cfg_;
  fs::path dir_;
  std::ostream& log_;
  std::map<AxisName, TransientMaps> fig3_cache_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-battery simulator for an NV-center electron spin with a 14N nucleus", "qb"};
  app.require_subcommand(1);
  app.fallthrough();
  ConfigFlags flags;
  flags.attach(app);

  auto* simulate = app.add_subcommand("simulate", "two-stage charge/store run");
  auto* steady = app.add_subcommand("steady", "closed-form steady state and its energetics");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep of stable coherence or transient ergotropy");
  SweepOptions sweep_opt;
  double at_time = 0.0;
  sweep->add_option("--axis", sweep_opt.axes, "name:min:max:n (omega/delta in MHz, psi in rad)")->required();
  sweep->add_option("--observable", sweep_opt.observable, "stable_coherence | w_coh | w_inc");
  auto* at_time_opt = sweep->add_option("--at-time", at_time, "late-time snapshot (us) instead of t -> infinity");
  sweep->add_option("--window", sweep_opt.window, "transient window in us (default 20/gamma)");
  sweep->add_option("--samples", sweep_opt.samples, "transient samples");

  auto* optimize = app.add_subcommand("optimize", "maximize stable coherence along one axis");
  std::string opt_axis;
  optimize->add_option("--axis", opt_axis, "name:min:max:n")->required();

  auto* reproduce = app.add_subcommand("reproduce", "regenerate preset figure data");
  std::string target;
  std::string out_dir = "qb_output";
  reproduce->add_option("target", target,
                        "fig2a..fig2e, fig3a..fig3d, fig4a, fig4b, regimes, discussion, arbitration, all")
      ->required();
  reproduce->add_option("--output-dir", out_dir, "directory for the generated files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = flags.resolve();
    if (simulate->parsed()) return cmd_simulate(cfg, out, err);
    if (steady->parsed()) return cmd_steady(cfg, out, err);
    if (sweep->parsed()) {
      if (at_time_opt->count() > 0) sweep_opt.at_time = at_time;
      return cmd_sweep(cfg, sweep_opt, out, err);
    }
    if (optimize->parsed()) return cmd_optimize(cfg, opt_axis, out, err);
    if (reproduce->parsed()) {
      Reproducer(cfg, out_dir, out).run(target);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "qb: error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "qb: unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
  return kExitUsage;
}

}  // namespace qb
