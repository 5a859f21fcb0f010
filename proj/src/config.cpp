#include "kclind/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace kclind {

namespace {

std::string trim(const std::string& s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return {b, e};
}

// Pulls typed values out of the raw key/value map and remembers which keys
// were touched, so leftovers can be reported as unknown.
class Extractor {
public:
  explicit Extractor(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return kv_.count(key) > 0;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return to_double(key, it->second);
  }

  long get_long(const std::string& key, long fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
    }
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      out.push_back(to_double(key, trim(cell)));
    }
    if (out.empty()) {
      throw ConfigError("config: key '" + key + "' has an empty list");
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : kv_) {
      if (!used_.count(key)) {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  }

private:
  static double to_double(const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' is not a number: " + text);
    }
  }

  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

ScenarioKind parse_scenario(const std::string& name) {
  if (name == "custom") return ScenarioKind::Custom;
  if (name == "fig1") return ScenarioKind::Fig1;
  if (name == "fig2") return ScenarioKind::Fig2;
  if (name == "fig4") return ScenarioKind::Fig4;
  if (name == "fig5a") return ScenarioKind::Fig5a;
  if (name == "fig5b") return ScenarioKind::Fig5b;
  if (name == "fig6") return ScenarioKind::Fig6;
  if (name == "separable_max") return ScenarioKind::SeparableMax;
  if (name == "asymmetry_scan") return ScenarioKind::AsymmetryScan;
  if (name == "birth_time") return ScenarioKind::BirthTime;
  throw ConfigError("config: unknown scenario '" + name + "'");
}

ConstraintKind parse_constraint(const std::string& name) {
  if (name == "none") return ConstraintKind::None;
  if (name == "minus_minus") return ConstraintKind::MinusMinus;
  if (name == "plus_plus") return ConstraintKind::PlusPlus;
  if (name == "x_basis") return ConstraintKind::XBasis;
  throw ConfigError("config: unknown constraint '" + name + "'");
}

InitialStateSpec parse_initial(Extractor& ex) {
  InitialStateSpec spec;
  const std::string kind = ex.get_string("initial", "mm");
  static const std::set<std::string> named{"pp",           "pm",
                                           "mp",           "mm",
                                           "mixed",        "bell_phi_plus",
                                           "bell_phi_minus", "bell_psi_plus",
                                           "bell_psi_minus"};
  if (kind == "bloch") {
    spec.kind = InitialStateSpec::Kind::Bloch;
    spec.bloch_a = {ex.get_double("lambda_a", 1.0), ex.get_double("theta_a", 0.0),
                    ex.get_double("phi_a", 0.0)};
    spec.bloch_b = {ex.get_double("lambda_b", 1.0), ex.get_double("theta_b", 0.0),
                    ex.get_double("phi_b", 0.0)};
  } else if (kind == "matrix") {
    spec.kind = InitialStateSpec::Kind::RawMatrix;
    const std::vector<double> flat = ex.get_list("matrix", {});
    if (flat.size() != 32) {
      throw ConfigError("config: initial matrix needs 32 numbers (16 re,im pairs, row-major)");
    }
    spec.matrix = Matrix(4, 4);
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 4; ++j) {
        const std::size_t k = 2 * static_cast<std::size_t>(i * 4 + j);
        spec.matrix(i, j) = Complex(flat[k], flat[k + 1]);
      }
    }
  } else if (named.count(kind)) {
    spec.kind = InitialStateSpec::Kind::Named;
    spec.name = kind;
  } else {
    throw ConfigError("config: unknown initial state '" + kind + "'");
  }
  return spec;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }
  }
  return kv;
}

ScenarioConfig parse_scenario_config(std::istream& in) {
  Extractor ex(parse_key_values(in));
  ScenarioConfig cfg;

  cfg.scenario = parse_scenario(ex.get_string("scenario", "custom"));

  cfg.model.gamma_a = ex.get_double("gamma_a", 1.0);
  cfg.model.gamma_b = ex.get_double("gamma_b", 1.0);
  cfg.model.omega_a = ex.get_double("omega_a", 0.0);
  cfg.model.omega_b = ex.get_double("omega_b", 0.0);
  cfg.model.detuning = ex.get_double("detuning", 0.0);
  cfg.model.constraint = parse_constraint(ex.get_string("constraint", "minus_minus"));
  if (cfg.model.gamma_a < 0.0 || cfg.model.gamma_b < 0.0) {
    throw ConfigError("config: decay rates must be >= 0");
  }

  cfg.initial = parse_initial(ex);

  cfg.t_max = ex.get_double("t_max", cfg.t_max);
  cfg.n_points = static_cast<int>(ex.get_long("n_points", cfg.n_points));
  if (!(cfg.t_max > 0.0) || cfg.n_points < 2) {
    throw ConfigError("config: need t_max > 0 and n_points >= 2");
  }

  cfg.lambda = ex.get_double("lambda", cfg.lambda);
  cfg.lambda_grid = ex.get_list("lambda_grid", cfg.lambda_grid);
  cfg.birth_threshold = ex.get_double("birth_threshold", cfg.birth_threshold);

  cfg.lambda_points = static_cast<int>(ex.get_long("lambda_points", cfg.lambda_points));
  cfg.theta_points = static_cast<int>(ex.get_long("theta_points", cfg.theta_points));
  cfg.phi_points = static_cast<int>(ex.get_long("phi_points", cfg.phi_points));
  cfg.lambda_cap = ex.get_double("lambda_cap", cfg.lambda_cap);
  if (cfg.lambda_points < 2 || cfg.theta_points < 2 || cfg.phi_points < 1 ||
      !(cfg.lambda_cap > 0.0) || cfg.lambda_cap > 1.0) {
    throw ConfigError("config: bad separable_max grid");
  }

  cfg.delta_grid = ex.get_list("delta_grid", cfg.delta_grid);

  cfg.omega_ratio_min = ex.get_double("omega_ratio_min", cfg.omega_ratio_min);
  cfg.omega_ratio_max = ex.get_double("omega_ratio_max", cfg.omega_ratio_max);
  cfg.omega_ratio_points =
      static_cast<int>(ex.get_long("omega_ratio_points", cfg.omega_ratio_points));
  cfg.gamma_ratios = ex.get_list("gamma_ratios", cfg.gamma_ratios);
  if (!(cfg.omega_ratio_min > 0.0) || cfg.omega_ratio_max < cfg.omega_ratio_min ||
      cfg.omega_ratio_points < 1) {
    throw ConfigError("config: bad fig6 grid");
  }

  const std::string side = ex.get_string("measurement_side", "b");
  if (side == "b") {
    cfg.measurement_side = MeasuredSide::B;
  } else if (side == "a") {
    cfg.measurement_side = MeasuredSide::A;
  } else {
    throw ConfigError("config: measurement_side must be 'a' or 'b'");
  }

  cfg.out = ex.get_string("out", "");
  cfg.threads = static_cast<int>(ex.get_long("threads", cfg.threads));
  if (cfg.threads < 1) {
    throw ConfigError("config: threads must be >= 1");
  }
  cfg.seed = static_cast<unsigned long>(ex.get_long("seed", 0));

  ex.finish();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config " + path.string());
  }
  return parse_scenario_config(in);
}

ScenarioConfig default_figure_config(ScenarioKind kind) {
  ScenarioConfig cfg;
  cfg.scenario = kind;
  switch (kind) {
    case ScenarioKind::Fig1:
      cfg.initial.kind = InitialStateSpec::Kind::Bloch;
      break;
    case ScenarioKind::Fig2:
      cfg.initial.kind = InitialStateSpec::Kind::Bloch;
      cfg.lambda = 0.5;
      break;
    case ScenarioKind::Fig4:
      cfg.model.omega_a = cfg.model.omega_b = 1.0;
      cfg.initial.name = "mm";
      break;
    case ScenarioKind::Fig5a:
      cfg.model.omega_a = cfg.model.omega_b = 1.0;
      cfg.initial.name = "mm";
      break;
    case ScenarioKind::Fig5b:
      cfg.model.omega_a = cfg.model.omega_b = 1.0;
      cfg.initial.name = "pp";
      break;
    case ScenarioKind::Fig6:
      cfg.model.omega_a = 1.0;
      break;
    default:
      throw ConfigError("figure: expected one of fig1 fig2 fig4 fig5a fig5b fig6");
  }
  return cfg;
}

const char* scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Custom: return "custom";
    case ScenarioKind::Fig1: return "fig1";
    case ScenarioKind::Fig2: return "fig2";
    case ScenarioKind::Fig4: return "fig4";
    case ScenarioKind::Fig5a: return "fig5a";
    case ScenarioKind::Fig5b: return "fig5b";
    case ScenarioKind::Fig6: return "fig6";
    case ScenarioKind::SeparableMax: return "separable_max";
    case ScenarioKind::AsymmetryScan: return "asymmetry_scan";
    case ScenarioKind::BirthTime: return "birth_time";
  }
  return "?";
}

}  // namespace kclind
