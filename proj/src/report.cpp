#include "qb/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace qb {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_sig12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig12(v);
}

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
}

std::string axis_column(AxisName name) {
  switch (name) {
    case AxisName::omega_rabi: return "omega_mhz";
    case AxisName::delta: return "delta_mhz";
    case AxisName::psi: return "psi_rad";
    case AxisName::time: return "t_us";
  }
  return "x";
}

double axis_to_user(AxisName name, double internal) {
  return name == AxisName::omega_rabi || name == AxisName::delta ? angular_to_mhz(internal) : internal;
}

double axis_from_user(AxisName name, double user) {
  return name == AxisName::omega_rabi || name == AxisName::delta ? mhz_to_angular(user) : user;
}

void write_series_header(std::ostream& out, bool with_stage) {
  std::vector<std::string> cols;
  if (with_stage) cols.push_back("stage");
  for (const char* c : {"t_us", "E", "W", "Wi", "Wc", "C", "ratio_coh"}) cols.emplace_back(c);
  CsvWriter(out).row(cols);
}

void write_series_csv(std::ostream& out, std::span<const EnergeticsRecord> series, double energy_scale,
                      std::string_view stage) {
  CsvWriter csv(out);
  for (const auto& r : series) {
    std::vector<std::string> f;
    if (!stage.empty()) f.emplace_back(stage);
    f.push_back(format_number(r.t));
    f.push_back(format_number(r.energy * energy_scale));
    f.push_back(format_number(r.ergotropy * energy_scale));
    f.push_back(format_number(r.incoherent * energy_scale));
    f.push_back(format_number(r.coherent * energy_scale));
    f.push_back(format_number(r.coherence));
    f.push_back(r.ratio_coh ? format_number(*r.ratio_coh) : "");
    csv.row(f);
  }
}

nlohmann::json record_json(const EnergeticsRecord& r, double energy_scale) {
  nlohmann::json j;
  j["t_us"] = json_number(r.t);
  j["E"] = json_number(r.energy * energy_scale);
  j["W"] = json_number(r.ergotropy * energy_scale);
  j["Wi"] = json_number(r.incoherent * energy_scale);
  j["Wc"] = json_number(r.coherent * energy_scale);
  j["C"] = json_number(r.coherence);
  j["ratio_coh"] = r.ratio_coh ? json_number(*r.ratio_coh) : nlohmann::json(nullptr);
  j["p_e"] = json_number(r.reduced(basis::excited, basis::excited).real());
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepField& field) {
  field.validate();
  CsvWriter csv(out);
  std::vector<std::string> header;
  for (const auto& a : field.axes) header.push_back(axis_column(a.name));
  header.push_back(field.observable);
  csv.row(header);

  const std::size_t inner = field.axes.size() == 2 ? field.axes[1].n_points : 1;
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    std::vector<std::string> row;
    row.push_back(format_number(axis_to_user(field.axes[0].name, field.axes[0].value(k / inner))));
    if (field.axes.size() == 2) {
      row.push_back(format_number(axis_to_user(field.axes[1].name, field.axes[1].value(k % inner))));
    }
    row.push_back(format_number(field.values[k]));
    csv.row(row);
  }
}

nlohmann::json sweep_json(const SweepField& field) {
  field.validate();
  nlohmann::json j;
  j["observable"] = field.observable;
  j["axes"] = nlohmann::json::array();
  for (const auto& a : field.axes) {
    j["axes"].push_back({{"name", std::string(to_string(a.name))},
                         {"column", axis_column(a.name)},
                         {"min", json_number(axis_to_user(a.name, a.min))},
                         {"max", json_number(axis_to_user(a.name, a.max))},
                         {"n_points", a.n_points},
                         {"scale", "linear"}});
  }
  j["values"] = nlohmann::json::array();
  for (double v : field.values) j["values"].push_back(json_number(v));
  return j;
}

}  // namespace qb
