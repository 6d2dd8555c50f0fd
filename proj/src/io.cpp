#include "phasekit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "phasekit/error.hpp"

#ifndef PHASEKIT_VERSION
#define PHASEKIT_VERSION "unknown"
#endif

namespace phasekit {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_double(v);
    first = false;
  }
  out << '\n';
}

std::string snap_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%05zu.csv", k);
  return buf;
}

template <class State>
void write_snapshot_set(const fs::path& dir, const std::vector<State>& snaps) {
  fs::create_directories(dir);
  auto index = open_out(dir / "index.csv");
  index << "k,t,file\n";
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    write_snapshot_csv(dir / snap_name(k), snaps[k]);
    index << k << ',' << format_double(snaps[k].t) << ',' << snap_name(k) << '\n';
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* version_string() { return PHASEKIT_VERSION; }

void write_snapshot_csv(const fs::path& path, const FluidState& s) {
  auto out = open_out(path);
  out << "x,rho,u,c\n";
  const auto& g = s.rho.grid();
  for (std::size_t i = 0; i < g.size(); ++i) write_row(out, {g.node(i), s.rho[i], s.u[i], s.c[i]});
}

void write_snapshot_csv(const fs::path& path, const BNState& s) {
  auto out = open_out(path);
  out << "x,alpha_p,alpha_m,rho_p,rho_m,u,c\n";
  const auto& g = s.u.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    write_row(out, {g.node(i), s.alpha_p[i], s.alpha_m[i], s.rho_p[i], s.rho_m[i], s.u[i], s.c[i]});
  }
}

void write_snapshots(const fs::path& dir, const std::vector<FluidState>& snaps) { write_snapshot_set(dir, snaps); }
void write_snapshots(const fs::path& dir, const std::vector<BNState>& snaps) { write_snapshot_set(dir, snaps); }

void write_diagnostics_csv(const fs::path& path, const std::vector<DiagnosticsRecord>& records) {
  auto out = open_out(path);
  out << "t,mass,momentum,energy,dissipation,bd_entropy,rho_min,rho_max,sigma_grad_l2,c_h2,inv_sqrt_rho_grad\n";
  for (const auto& r : records) {
    write_row(out, {r.t, r.mass, r.momentum, r.energy, r.dissipation, r.bd_entropy, r.rho_min, r.rho_max,
                    r.sigma_grad_l2, r.c_h2, r.inv_sqrt_rho_grad});
  }
}

void write_measure_summary_csv(const fs::path& path, const std::vector<double>& times,
                               const std::vector<ParamMeasure>& measures, const TestDictionary& dict) {
  if (times.size() != measures.size()) throw DomainError("measure summary needs one time per measure");
  auto out = open_out(path);
  out << 't';
  for (std::size_t j = 0; j < dict.size(); ++j) out << ',' << dict.label(j);
  out << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << format_double(times[k]);
    for (double v : pairings(measures[k], dict)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_distances_csv(const fs::path& path, const std::vector<double>& times,
                         const std::vector<double>& dict_distance, const std::vector<double>& wasserstein) {
  auto out = open_out(path);
  out << "t,dict_distance,wasserstein_avg\n";
  for (std::size_t k = 0; k < dict_distance.size(); ++k) write_row(out, {times[k], dict_distance[k], wasserstein[k]});
}

void write_convergence_csv(const fs::path& path, const ConvergenceReport& report) {
  auto out = open_out(path);
  out << "n,sup_t_measure_dist,sup_t_u_err";
  for (std::size_t k = 0; k < report.times.size(); ++k) out << ",dist_t" << k;
  for (std::size_t k = 0; k < report.times.size(); ++k) out << ",u_err_t" << k;
  out << '\n';
  for (const auto& m : report.members) {
    out << m.n << ',' << format_double(m.sup_distance) << ',' << format_double(m.sup_u_error);
    // Series of failed members are padded so every row has the full column count.
    for (std::size_t k = 0; k < report.times.size(); ++k) {
      out << ',' << (k < m.distance.size() ? format_double(m.distance[k]) : std::string("nan"));
    }
    for (std::size_t k = 0; k < report.times.size(); ++k) {
      out << ',' << (k < m.u_error.size() ? format_double(m.u_error[k]) : std::string("nan"));
    }
    out << '\n';
  }
}

void write_meta_json(const fs::path& path, const RunConfig& cfg, const nlohmann::ordered_json& run) {
  nlohmann::ordered_json j;
  j["config"] = to_json(cfg);
  j["provenance"] = {{"tool", "phasekit"}, {"version", version_string()}};
  j["run"] = run;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name) continue;
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
  }
  throw ConfigError("CSV has no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != t.header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

FluidState read_fluid_snapshot(const fs::path& path, double t) {
  const auto table = read_csv(path);
  const auto rho = table.column("rho");
  const auto u = table.column("u");
  const auto c = table.column("c");
  PeriodicGrid g(rho.size());
  auto field = [&](const std::vector<double>& v) {
    GridField f(g, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i];
    return f;
  };
  return FluidState{t, field(rho), field(u), field(c)};
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const fs::path& path) {
  const auto table = read_csv(path);
  std::vector<DiagnosticsRecord> out(table.rows.size());
  const char* names[] = {"t", "mass", "momentum", "energy", "dissipation", "bd_entropy",
                         "rho_min", "rho_max", "sigma_grad_l2", "c_h2", "inv_sqrt_rho_grad"};
  double DiagnosticsRecord::*members[] = {&DiagnosticsRecord::t,          &DiagnosticsRecord::mass,
                                          &DiagnosticsRecord::momentum,   &DiagnosticsRecord::energy,
                                          &DiagnosticsRecord::dissipation, &DiagnosticsRecord::bd_entropy,
                                          &DiagnosticsRecord::rho_min,    &DiagnosticsRecord::rho_max,
                                          &DiagnosticsRecord::sigma_grad_l2, &DiagnosticsRecord::c_h2,
                                          &DiagnosticsRecord::inv_sqrt_rho_grad};
  for (std::size_t f = 0; f < std::size(names); ++f) {
    const auto col = table.column(names[f]);
    for (std::size_t k = 0; k < col.size(); ++k) out[k].*members[f] = col[k];
  }
  return out;
}

}  // namespace phasekit
