#include "qb/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qb {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Config, "config key '" + std::string(key) + "': not a number: '" + s + "'");
}

std::size_t parse_count(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Config,
                "config key '" + std::string(key) + "': not a non-negative integer: '" + s + "'");
  }
  return v;
}

}  // namespace

ProtocolSpec RunConfig::protocol() const {
  ProtocolSpec spec;
  spec.constants = constants;
  spec.drive = drive;
  spec.storage_gamma = storage_gamma;
  spec.nuclear = nuclear;
  spec.theta_end = theta_end;
  spec.t_storage = t_storage;
  spec.charging_samples = charging_samples;
  spec.storage_samples = storage_samples;
  return spec;
}

double RunConfig::energy_scale() const {
  if (units == EnergyUnits::omega0) return 1.0;
  return qb_splitting(constants, drive.b_z).energy_uev;
}

std::string_view RunConfig::energy_unit_name() const {
  return units == EnergyUnits::omega0 ? "w0" : "ueV";
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "d_mhz",        "gamma_e_mhz_per_g", "q_mhz",            "gamma_n_mhz_per_g", "a_perp_mhz",
      "a_par_mhz",    "bz_gauss",          "omega_mhz",        "delta_mhz",         "gamma_mhz",
      "storage_gamma_mhz", "psi",          "theta_end",        "t_storage_us",      "charging_samples",
      "storage_samples",   "epsilon",      "output",           "format",            "units"};
  return keys;
}

void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto num = [&] { return parse_double(key, value); };
  const auto freq = [&] { return mhz_to_angular(parse_double(key, value)); };

  if (key == "d_mhz") cfg.constants.d = freq();
  else if (key == "gamma_e_mhz_per_g") cfg.constants.gamma_e = freq();
  else if (key == "q_mhz") cfg.constants.q = freq();
  else if (key == "gamma_n_mhz_per_g") cfg.constants.gamma_n = freq();
  else if (key == "a_perp_mhz") cfg.constants.a_perp = freq();
  else if (key == "a_par_mhz") cfg.constants.a_par = freq();
  else if (key == "bz_gauss") cfg.drive.b_z = num();
  else if (key == "omega_mhz") cfg.drive.omega_rabi = freq();
  else if (key == "delta_mhz") cfg.drive.detuning = freq();
  else if (key == "gamma_mhz") cfg.drive.gamma = freq();
  else if (key == "storage_gamma_mhz") cfg.storage_gamma = freq();
  else if (key == "psi") cfg.nuclear.psi = num();
  else if (key == "theta_end") cfg.theta_end = num();
  else if (key == "t_storage_us") cfg.t_storage = num();
  else if (key == "charging_samples") cfg.charging_samples = parse_count(key, value);
  else if (key == "storage_samples") cfg.storage_samples = parse_count(key, value);
  else if (key == "epsilon") cfg.epsilon = num();
  else if (key == "output") cfg.output = trim(value);
  else if (key == "format") {
    const std::string v = trim(value);
    if (v == "csv") cfg.format = OutputFormat::csv;
    else if (v == "json") cfg.format = OutputFormat::json;
    else throw Error(ErrorCode::Config, "config key 'format': expected csv or json, got '" + v + "'");
  } else if (key == "units") {
    const std::string v = trim(value);
    if (v == "w0") cfg.units = EnergyUnits::omega0;
    else if (v == "ueV") cfg.units = EnergyUnits::micro_ev;
    else throw Error(ErrorCode::Config, "config key 'units': expected w0 or ueV, got '" + v + "'");
  } else {
    throw Error(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Config, "config line " + std::to_string(lineno) + ": expected key=value");
    }
    apply_config_value(cfg, trim(std::string_view(t).substr(0, eq)),
                       std::string_view(t).substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

}  // namespace qb
