#include "phasekit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include "phasekit/error.hpp"

namespace phasekit {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Reference to one config member of a supported type.
using FieldRef = std::variant<double*, int*, std::string*, std::vector<double>*, std::vector<int>*,
                              std::vector<std::string>*>;

struct Field {
  const char* section;
  const char* key;
  std::function<FieldRef(RunConfig&)> ref;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      {"physics", "mu", [](RunConfig& c) -> FieldRef { return &c.mu; }},
      {"physics", "kappa", [](RunConfig& c) -> FieldRef { return &c.kappa; }},
      {"physics", "gamma", [](RunConfig& c) -> FieldRef { return &c.gamma; }},
      {"eos", "type", [](RunConfig& c) -> FieldRef { return &c.eos.type; }},
      {"eos", "A", [](RunConfig& c) -> FieldRef { return &c.eos.A; }},
      {"eos", "B", [](RunConfig& c) -> FieldRef { return &c.eos.B; }},
      {"eos", "R", [](RunConfig& c) -> FieldRef { return &c.eos.R; }},
      {"eos", "T", [](RunConfig& c) -> FieldRef { return &c.eos.T; }},
      {"eos", "a", [](RunConfig& c) -> FieldRef { return &c.eos.a; }},
      {"eos", "beta", [](RunConfig& c) -> FieldRef { return &c.eos.beta; }},
      {"grid", "N", [](RunConfig& c) -> FieldRef { return &c.N; }},
      {"grid", "backend", [](RunConfig& c) -> FieldRef { return &c.backend; }},
      {"scheme", "upwind", [](RunConfig& c) -> FieldRef { return &c.upwind; }},
      {"scheme", "capillarity", [](RunConfig& c) -> FieldRef { return &c.capillarity; }},
      {"time", "dt", [](RunConfig& c) -> FieldRef { return &c.dt; }},
      {"time", "cfl", [](RunConfig& c) -> FieldRef { return &c.cfl; }},
      {"time", "t_end", [](RunConfig& c) -> FieldRef { return &c.t_end; }},
      {"time", "snapshot_every", [](RunConfig& c) -> FieldRef { return &c.snapshot_every; }},
      {"time", "snapshot_dt", [](RunConfig& c) -> FieldRef { return &c.snapshot_dt; }},
      {"init", "profile", [](RunConfig& c) -> FieldRef { return &c.init.profile; }},
      {"init", "v_minus", [](RunConfig& c) -> FieldRef { return &c.init.v_minus; }},
      {"init", "v_plus", [](RunConfig& c) -> FieldRef { return &c.init.v_plus; }},
      {"init", "theta", [](RunConfig& c) -> FieldRef { return &c.init.theta; }},
      {"init", "delta", [](RunConfig& c) -> FieldRef { return &c.init.delta; }},
      {"init", "n_osc", [](RunConfig& c) -> FieldRef { return &c.init.n_osc; }},
      {"init", "rho_mean", [](RunConfig& c) -> FieldRef { return &c.init.rho_mean; }},
      {"init", "rho_sin", [](RunConfig& c) -> FieldRef { return &c.init.rho_sin; }},
      {"init", "rho_cos", [](RunConfig& c) -> FieldRef { return &c.init.rho_cos; }},
      {"init", "u_mean", [](RunConfig& c) -> FieldRef { return &c.init.u_mean; }},
      {"init", "u_sin", [](RunConfig& c) -> FieldRef { return &c.init.u_sin; }},
      {"init", "u_cos", [](RunConfig& c) -> FieldRef { return &c.init.u_cos; }},
      {"bn", "initial", [](RunConfig& c) -> FieldRef { return &c.bn.initial; }},
      {"bn", "alpha_p", [](RunConfig& c) -> FieldRef { return &c.bn.alpha_p; }},
      {"bn", "alpha_p_sin", [](RunConfig& c) -> FieldRef { return &c.bn.alpha_p_sin; }},
      {"bn", "rho_p", [](RunConfig& c) -> FieldRef { return &c.bn.rho_p; }},
      {"bn", "rho_p_sin", [](RunConfig& c) -> FieldRef { return &c.bn.rho_p_sin; }},
      {"bn", "rho_m", [](RunConfig& c) -> FieldRef { return &c.bn.rho_m; }},
      {"bn", "rho_m_sin", [](RunConfig& c) -> FieldRef { return &c.bn.rho_m_sin; }},
      {"bounds", "M0", [](RunConfig& c) -> FieldRef { return &c.M0; }},
      {"harness", "n_list", [](RunConfig& c) -> FieldRef { return &c.harness.n_list; }},
      {"harness", "dict_modes", [](RunConfig& c) -> FieldRef { return &c.harness.dict_modes; }},
      {"harness", "dict_powers", [](RunConfig& c) -> FieldRef { return &c.harness.dict_powers; }},
      {"harness", "snapshots", [](RunConfig& c) -> FieldRef { return &c.harness.snapshots; }},
      {"harness", "threads", [](RunConfig& c) -> FieldRef { return &c.harness.threads; }},
      {"output", "directory", [](RunConfig& c) -> FieldRef { return &c.output.directory; }},
      {"output", "formats", [](RunConfig& c) -> FieldRef { return &c.output.formats; }},
  };
  return table;
}

const char* section_order[] = {"physics", "eos", "grid", "scheme", "time", "init", "bn", "bounds", "harness", "output"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) throw std::invalid_argument("expected a number");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("expected an integer");
  return v;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(std::string s) {
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list entry");
    out.push_back(item);
  }
  return out;
}

void assign_text(FieldRef ref, const std::string& value) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) *p = parse_double(value);
        else if constexpr (std::is_same_v<T, int>) *p = parse_int(value);
        else if constexpr (std::is_same_v<T, std::string>) *p = unquote(value);
        else if constexpr (std::is_same_v<T, std::vector<double>>) {
          p->clear();
          for (const auto& s : split_list(value)) p->push_back(parse_double(s));
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          p->clear();
          for (const auto& s : split_list(value)) p->push_back(parse_int(s));
        } else {
          p->clear();
          for (const auto& s : split_list(value)) p->push_back(unquote(s));
        }
      },
      ref);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string text_value(FieldRef ref) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) return format_number(*p);
        else if constexpr (std::is_same_v<T, int>) return std::to_string(*p);
        else if constexpr (std::is_same_v<T, std::string>) return "\"" + *p + "\"";
        else {
          std::string s = "[";
          for (std::size_t k = 0; k < p->size(); ++k) {
            if (k > 0) s += ", ";
            if constexpr (std::is_same_v<T, std::vector<double>>) s += format_number((*p)[k]);
            else if constexpr (std::is_same_v<T, std::vector<int>>) s += std::to_string((*p)[k]);
            else s += "\"" + (*p)[k] + "\"";
          }
          return s + "]";
        }
      },
      ref);
}

using Lines = std::map<std::string, int>;

class Checker {
 public:
  Checker(const Lines* lines, std::string source) : lines_(lines), source_(std::move(source)) {}

  void require(bool ok, const char* section, const char* key, const std::string& msg) const {
    if (ok) return;
    std::ostringstream os;
    os << source_;
    if (lines_) {
      const auto it = lines_->find(std::string(section) + "." + key);
      if (it != lines_->end()) os << ":" << it->second;
    }
    os << ": [" << section << "]." << key << " " << msg;
    throw ConfigError(os.str());
  }

 private:
  const Lines* lines_;
  std::string source_;
};

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
  return std::any_of(opts.begin(), opts.end(), [&](const char* o) { return v == o; });
}

void check(const RunConfig& c, const Checker& ck) {
  ck.require(c.mu > 0.0, "physics", "mu", "must be > 0");
  ck.require(c.kappa > 0.0, "physics", "kappa", "must be > 0");
  ck.require(c.gamma >= 0.0, "physics", "gamma", "must be >= 0");
  ck.require(one_of(c.eos.type, {"van_der_waals", "polytropic"}), "eos", "type",
             "must be van_der_waals or polytropic");
  if (c.eos.type == "van_der_waals") {
    ck.require(c.eos.A > 0.0, "eos", "A", "must be > 0");
    ck.require(c.eos.B > 0.0, "eos", "B", "must be > 0");
    ck.require(c.eos.R > 0.0, "eos", "R", "must be > 0");
    ck.require(c.eos.T > 0.0, "eos", "T", "must be > 0");
  } else {
    ck.require(c.eos.a > 0.0, "eos", "a", "must be > 0");
    ck.require(c.eos.beta >= 2.0, "eos", "beta", "must be >= 2");
  }
  ck.require(c.N >= 8 && c.N % 2 == 0, "grid", "N", "must be even and >= 8");
  ck.require(one_of(c.backend, {"fourier", "finite_difference"}), "grid", "backend",
             "must be fourier or finite_difference");
  ck.require(c.upwind >= 0.0, "scheme", "upwind", "must be >= 0");
  ck.require(one_of(c.capillarity, {"artificial_pressure", "original"}), "scheme", "capillarity",
             "must be artificial_pressure or original");
  ck.require(c.dt > 0.0, "time", "dt", "must be > 0");
  ck.require(c.cfl > 0.0 && c.cfl <= 1.0, "time", "cfl", "must lie in (0, 1]");
  ck.require(c.t_end > 0.0, "time", "t_end", "must be > 0");
  ck.require(c.snapshot_every >= 0, "time", "snapshot_every", "must be >= 0");
  ck.require(c.snapshot_dt >= 0.0, "time", "snapshot_dt", "must be >= 0");
  ck.require(one_of(c.init.profile, {"two_value", "sine"}), "init", "profile", "must be two_value or sine");
  ck.require(c.init.v_minus > 0.0, "init", "v_minus", "must be > 0");
  ck.require(c.init.v_plus > 0.0, "init", "v_plus", "must be > 0");
  ck.require(c.init.theta > 0.0 && c.init.theta < 1.0, "init", "theta", "must lie in (0, 1)");
  ck.require(c.init.delta > 0.0 && c.init.delta < std::min(c.init.theta, 1.0 - c.init.theta), "init", "delta",
             "must lie in (0, min(theta, 1 - theta))");
  ck.require(c.init.n_osc >= 1, "init", "n_osc", "must be >= 1");
  ck.require(c.init.rho_mean > 0.0, "init", "rho_mean", "must be > 0");
  ck.require(one_of(c.bn.initial, {"limit", "fields"}), "bn", "initial", "must be limit or fields");
  ck.require(c.bn.alpha_p >= 0.0 && c.bn.alpha_p <= 1.0, "bn", "alpha_p", "must lie in [0, 1]");
  ck.require(c.bn.rho_p > 0.0, "bn", "rho_p", "must be > 0");
  ck.require(c.bn.rho_m > 0.0, "bn", "rho_m", "must be > 0");
  ck.require(c.M0 > 0.5, "bounds", "M0", "must be > 0.5 so that 1/(2 M0) < 2 M0");
  const auto& nl = c.harness.n_list;
  ck.require(!nl.empty(), "harness", "n_list", "must not be empty");
  ck.require(std::all_of(nl.begin(), nl.end(), [](int n) { return n >= 1; }), "harness", "n_list",
             "entries must be >= 1");
  ck.require(std::adjacent_find(nl.begin(), nl.end(), std::greater_equal<int>()) == nl.end(), "harness", "n_list",
             "must be strictly increasing");
  ck.require(c.harness.dict_modes >= 0, "harness", "dict_modes", "must be >= 0");
  ck.require(c.harness.dict_powers >= 0, "harness", "dict_powers", "must be >= 0");
  ck.require(c.harness.snapshots >= 1, "harness", "snapshots", "must be >= 1");
  ck.require(c.harness.threads >= 0, "harness", "threads", "must be >= 0");
  ck.require(!c.output.directory.empty(), "output", "directory", "must not be empty");
  ck.require(std::all_of(c.output.formats.begin(), c.output.formats.end(),
                         [](const std::string& f) { return f == "csv" || f == "json"; }),
             "output", "formats", "entries must be csv or json");
}

}  // namespace

EquationOfState RunConfig::make_eos() const {
  if (eos.type == "polytropic") return EquationOfState::polytropic(eos.a, eos.beta, gamma);
  return EquationOfState::van_der_waals(eos.A, eos.B, eos.R, eos.T, gamma);
}

PhysicalParams RunConfig::physical() const { return PhysicalParams(mu, kappa, make_eos()); }

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.dt = dt;
  s.cfl = cfl;
  s.t_end = t_end;
  s.lower = lower();
  s.upper = upper();
  s.snapshot_every = snapshot_every;
  s.snapshot_dt = snapshot_dt;
  s.scheme.upwind = upwind;
  s.scheme.capillarity = capillarity == "original" ? CapillarityForm::original : CapillarityForm::artificial_pressure;
  s.scheme.helmholtz = backend == "finite_difference" ? HelmholtzBackend::finite_difference : HelmholtzBackend::fourier;
  return s;
}

TwoValueProfile RunConfig::profile() const { return {init.v_minus, init.v_plus, init.theta, init.delta}; }

VelocityProfile RunConfig::velocity() const { return {init.u_mean, init.u_sin, init.u_cos}; }

FamilyConfig RunConfig::family() const {
  FamilyConfig f(physical());
  f.n_list = harness.n_list;
  f.profile = profile();
  f.u0 = velocity();
  f.solver = solver();
  f.grid_n = static_cast<std::size_t>(N);
  f.dict_modes = harness.dict_modes;
  f.dict_powers = harness.dict_powers;
  f.snapshots = harness.snapshots;
  f.threads = harness.threads;
  return f;
}

void validate(const RunConfig& cfg) { check(cfg, Checker(nullptr, "<config>")); }

RunConfig parse_config(std::string_view text, const std::string& source) {
  RunConfig cfg;
  Lines lines;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << lineno << ": " << msg;
    throw ConfigError(os.str());
  };
  while (std::getline(in, raw)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    std::size_t cut = raw.size();
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (raw[k] == '"') quoted = !quoted;
      if (raw[k] == '#' && !quoted) {
        cut = k;
        break;
      }
    }
    const std::string line = trim(std::string_view(raw).substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(std::begin(section_order), std::end(section_order), section) == std::end(section_order)) {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside any [section]");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.section == section && f.key == key; });
    if (it == table.end()) fail("unknown key [" + section + "]." + key);
    const std::string name = section + "." + key;
    if (lines.count(name)) fail("duplicate key [" + section + "]." + key);
    lines[name] = lineno;
    try {
      assign_text(it->ref(cfg), value);
    } catch (const std::invalid_argument& e) {
      fail("[" + section + "]." + key + ": " + e.what() + ", got '" + value + "'");
    }
  }
  check(cfg, Checker(&lines, source));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return config_from_json(json::parse(ss.str()));
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return parse_config(ss.str(), path.string());
}

ojson to_json(const RunConfig& cfg) {
  RunConfig c = cfg;
  ojson j = ojson::object();
  for (const char* s : section_order) j[s] = ojson::object();
  for (const auto& f : fields()) {
    std::visit([&](auto* p) { j[f.section][f.key] = *p; }, f.ref(c));
  }
  return j;
}

RunConfig config_from_json(const json& in) {
  const json& j = in.contains("config") ? in.at("config") : in;
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  RunConfig cfg;
  for (const auto& [section, body] : j.items()) {
    if (std::find(std::begin(section_order), std::end(section_order), section) == std::end(section_order)) {
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body.items()) {
      const auto& table = fields();
      const auto it = std::find_if(table.begin(), table.end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == table.end()) throw ConfigError("unknown key [" + section + "]." + key);
      try {
        std::visit([&](auto* p) { value.get_to(*p); }, it->ref(cfg));
      } catch (const json::exception&) {
        throw ConfigError("[" + section + "]." + key + ": wrong value type");
      }
    }
  }
  check(cfg, Checker(nullptr, "<json>"));
  return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
  RunConfig c = cfg;
  std::ostringstream os;
  std::string current;
  for (const auto& f : fields()) {
    if (current != f.section) {
      if (!current.empty()) os << "\n";
      current = f.section;
      os << "[" << current << "]\n";
    }
    os << f.key << " = " << text_value(f.ref(c)) << "\n";
  }
  return os.str();
}

}  // namespace phasekit
