#pragma once

// Flat key=value run configuration. Keys use ordinary frequencies in MHz,
// times in us, fields in Gauss and psi in radians; frequencies are converted
// to rad/us as each value is ingested and stored internally in rad/us only.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qb/protocol.hpp"

namespace qb {

enum class OutputFormat { csv, json };
enum class EnergyUnits { omega0, micro_ev };

struct RunConfig {
  PhysicalConstants constants;
  DriveParams drive;
  NuclearInit nuclear;
  std::optional<double> storage_gamma;
  double theta_end = std::numbers::pi;
  double t_storage = 10.0;
  std::size_t charging_samples = 501;
  std::size_t storage_samples = 2001;
  double epsilon = kDefaultStorageEpsilon;
  std::string output;
  std::optional<OutputFormat> format;
  EnergyUnits units = EnergyUnits::omega0;

  ProtocolSpec protocol() const;
  // Multiplier from omega0 units to the configured energy unit.
  double energy_scale() const;
  std::string_view energy_unit_name() const;
};

// All accepted keys, in documentation order.
const std::vector<std::string_view>& config_keys();

// Throws ErrorCode::Config for unknown keys or unparsable values.
void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

// Lines of key=value; blank lines and '#' comments ignored.
void apply_config_text(RunConfig& cfg, std::string_view text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

}  // namespace qb
