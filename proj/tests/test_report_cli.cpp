#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qb/cli.hpp"
#include "qb/config.hpp"
#include "qb/report.hpp"
#include "qb/reproduce.hpp"

using namespace qb;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qb_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1 + 0.2) == "0.3");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(round_sig12(1.0 / 3.0) == 0.333333333333);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  std::ostringstream s;
  CsvWriter(s).row({"x", "1,2", ""});
  CHECK(s.str() == "x,\"1,2\",\n");
}

TEST_CASE("config parsing") {
  RunConfig cfg;
  apply_config_text(cfg, "# comment\n\nomega_mhz = 2  # trailing\ngamma_mhz=0.5\npsi=0.25\nformat=json\n");
  CHECK(cfg.drive.omega_rabi == doctest::Approx(2.0 * 2.0 * std::numbers::pi));
  CHECK(cfg.drive.gamma == doctest::Approx(std::numbers::pi));
  CHECK(cfg.nuclear.psi == 0.25);
  REQUIRE(cfg.format);
  CHECK(*cfg.format == OutputFormat::json);
  CHECK(config_keys().size() == 20);

  const auto code_of = [](std::string_view text) {
    RunConfig c;
    try {
      apply_config_text(c, text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidState;
  };
  CHECK(code_of("omega=1") == ErrorCode::Config);
  CHECK(code_of("omega_mhz=fast") == ErrorCode::Config);
  CHECK(code_of("omega_mhz 1") == ErrorCode::Config);
  CHECK(code_of("charging_samples=-3") == ErrorCode::Config);
  CHECK(code_of("units=eV") == ErrorCode::Config);
  CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/qb.cfg"), Error);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::Config) == 3);
  CHECK(exit_code_for(ErrorCode::NoSteadyState) == 5);
  CHECK(exit_code_for(ErrorCode::NotHermitian) == 9);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"--bogus", "steady"}).code == kExitUsage);
  CHECK(cli({"steady", "--gamma-mhz", "0"}).code == kExitNoSteadyState);
  CHECK(cli({"steady", "--omega-mhz", "x"}).code == kExitConfig);
  CHECK(cli({"--config", "/nonexistent/qb.cfg", "steady"}).code == kExitIo);
  CHECK(cli({"sweep", "--axis", "psi:0:9:3"}).code == kExitInvalidArgument);
  CHECK(cli({"reproduce", "fig9"}).code != kExitOk);
}

TEST_CASE("steady subcommand") {
  const auto r = cli({"steady", "--omega-mhz", "1", "--gamma-mhz", "0.1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  // s = W^2/g^2 = 100 on resonance
  CHECK(j["p_e"].get<double>() == doctest::Approx(100.0 / 201.0).epsilon(1e-11));
  CHECK(j["Wi"].get<double>() == 0.0);
  CHECK(j["ratio_coh"].get<double>() == doctest::Approx(1.0));
  CHECK(j["units"] == "w0");
  CHECK(r.err.find("p_e") != std::string::npos);
}

TEST_CASE("config file and flags agree") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "omega_mhz=0.7\ndelta_mhz=0.2\ngamma_mhz=0.3\n";
  }
  const auto a = cli({"--config", (dir / "run.cfg").string(), "steady"});
  const auto b = cli({"steady", "--omega-mhz", "0.7", "--delta-mhz", "0.2", "--gamma-mhz", "0.3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  // flags override the file
  const auto c = cli({"--config", (dir / "run.cfg").string(), "steady", "--omega-mhz", "1"});
  CHECK(c.out != a.out);
  fs::remove_all(dir);
}

TEST_CASE("reproduce fig2a: ideal Rabi charging, byte-identical reruns") {
  const fs::path dir = scratch("fig2a");
  REQUIRE(cli({"reproduce", "fig2a", "--output-dir", dir.string()}).code == 0);
  const std::string first = slurp(dir / "fig2a.csv");
  REQUIRE(cli({"reproduce", "fig2a", "--output-dir", dir.string()}).code == 0);
  CHECK(slurp(dir / "fig2a.csv") == first);

  const double om = fig2_protocol('a').drive.omega_rabi;
  std::istringstream in(first);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t_us,E,W,Wi,Wc,C,ratio_coh");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto f = split(line);
    REQUIRE(f.size() == 7);
    const double t = std::stod(f[0]);
    const double p = std::pow(std::sin(om * t / 2.0), 2);
    const double e = std::stod(f[1]);
    CHECK(std::abs(e - p) <= 1e-8);
    // pure state: all energy is extractable
    CHECK(std::abs(std::stod(f[2]) - p) <= 1e-8);
    CHECK(std::abs(std::stod(f[3]) - std::max(0.0, 2.0 * p - 1.0)) <= 1e-8);
    CHECK(std::abs(std::stod(f[4]) - std::min(p, 1.0 - p)) <= 1e-8);
    const double h = (p <= 0.0 || p >= 1.0) ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p);
    CHECK(std::abs(std::stod(f[5]) - h) <= 1e-6);
    ++rows;
  }
  CHECK(rows == fig2_protocol('a').charging_samples);
  fs::remove_all(dir);
}

TEST_CASE("sweep and optimize subcommands") {
  const auto s = cli({"--gamma-mhz", "0.1", "sweep", "--axis", "omega:0.01:0.3:4"});
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("omega_mhz,", 0) == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 5);

  const auto o = cli({"--gamma-mhz", "0.1", "--format", "json", "optimize", "--axis", "omega:0.01:0.3:30"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j.dump().find("multimodal") != std::string::npos);
}
