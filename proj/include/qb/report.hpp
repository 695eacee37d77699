#pragma once

// CSV and JSON emission. Numbers are written with 12 significant digits so
// repeated runs produce byte-identical files.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qb/energetics.hpp"
#include "qb/sweep.hpp"

namespace qb {

std::string format_number(double v);

// Rounds to 12 significant digits (JSON values go through this).
double round_sig12(double v);

// RFC-4180 field quoting: fields containing a comma, quote or line break are
// wrapped in quotes with embedded quotes doubled.
std::string csv_field(std::string_view text);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// Axis coordinates in user units: MHz for omega/delta, radians for psi, us for time.
std::string axis_column(AxisName name);
double axis_to_user(AxisName name, double internal);
double axis_from_user(AxisName name, double user);

// Energies are multiplied by energy_scale (1 for omega0 units, hbar*omega0 for ueV).
void write_series_csv(std::ostream& out, std::span<const EnergeticsRecord> series, double energy_scale,
                      std::string_view stage = {});
void write_series_header(std::ostream& out, bool with_stage);

nlohmann::json record_json(const EnergeticsRecord& r, double energy_scale);

void write_sweep_csv(std::ostream& out, const SweepField& field);
nlohmann::json sweep_json(const SweepField& field);

}  // namespace qb
