#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phasekit/harness.hpp"

namespace phasekit {

struct EosSpec {
  std::string type = "van_der_waals";
  double A = 1.0;
  double B = 4.0;
  double R = 1.0;
  double T = 4.0;
  double a = 1.0;
  double beta = 2.0;

  bool operator==(const EosSpec&) const = default;
};

struct InitSpec {
  /// two_value: oscillating profile repeated n_osc times; sine: rho_mean + Fourier modes.
  std::string profile = "two_value";
  double v_minus = 0.8;
  double v_plus = 1.6;
  double theta = 0.5;
  double delta = 0.125;
  int n_osc = 4;
  double rho_mean = 1.2;
  std::vector<double> rho_sin;
  std::vector<double> rho_cos;
  double u_mean = 0.0;
  std::vector<double> u_sin{0.1};
  std::vector<double> u_cos;

  bool operator==(const InitSpec&) const = default;
};

struct BnSpec {
  /// limit: constants from the [init] two-value profile; fields: the Fourier data below.
  std::string initial = "limit";
  double alpha_p = 0.5;
  std::vector<double> alpha_p_sin;
  double rho_p = 1.6;
  std::vector<double> rho_p_sin;
  double rho_m = 0.8;
  std::vector<double> rho_m_sin;

  bool operator==(const BnSpec&) const = default;
};

struct HarnessSpec {
  std::vector<int> n_list{4, 8, 16, 32};
  int dict_modes = 4;
  int dict_powers = 4;
  int snapshots = 10;
  int threads = 0;

  bool operator==(const HarnessSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  // [physics]
  double mu = 0.1;
  double kappa = 0.1;
  double gamma = 2.0;
  // [eos]
  EosSpec eos;
  // [grid]
  int N = 256;
  std::string backend = "fourier";
  // [scheme]
  double upwind = 0.5;
  std::string capillarity = "artificial_pressure";
  // [time]
  double dt = 1e-3;
  double cfl = 0.5;
  double t_end = 0.1;
  int snapshot_every = 0;
  double snapshot_dt = 0.0;
  // [init], [bn]
  InitSpec init;
  BnSpec bn;
  // [bounds]
  double M0 = 1.6;
  // [harness], [output]
  HarnessSpec harness;
  OutputSpec output;

  bool operator==(const RunConfig&) const = default;

  double lower() const { return 1.0 / (2.0 * M0); }
  double upper() const { return 2.0 * M0; }
  EquationOfState make_eos() const;
  PhysicalParams physical() const;
  SolverConfig solver() const;
  TwoValueProfile profile() const;
  VelocityProfile velocity() const;
  FamilyConfig family() const;
};

/// Parses the [section] key = value format. Unknown sections or keys, malformed values and failed
/// validation throw ConfigError naming the line and [section].key.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads a config file; a .json file is read as a meta.json echo.
RunConfig load_config(const std::filesystem::path& path);

/// The per-field checks of parse_config, without line information.
void validate(const RunConfig& cfg);

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Accepts either the config object or a meta.json with a "config" member.
RunConfig config_from_json(const nlohmann::json& j);

/// Config text that parses back to cfg.
std::string to_config_text(const RunConfig& cfg);

}  // namespace phasekit
