#include "pnm_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pnm/errors.hpp"

namespace pnm::cli {

namespace {

const std::map<std::string, Constraint>& schema() {
  static const std::map<std::string, Constraint> s{
      {"experiment.name", Constraint::kAny},
      {"experiment.offresonant_ratio", Constraint::kPositive},
      {"siv.lambda_ghz", Constraint::kNonNegative},
      {"siv.gamma_x_ghz", Constraint::kAny},
      {"siv.gamma_y_ghz", Constraint::kAny},
      {"siv.f", Constraint::kAny},
      {"siv.gamma_s_ghz_per_t", Constraint::kPositive},
      {"siv.bx_t", Constraint::kAny},
      {"siv.by_t", Constraint::kAny},
      {"siv.bz_t", Constraint::kAny},
      {"siv.initial_level", Constraint::kPositive},
      {"mode.omega_ph_ghz", Constraint::kPositive},
      {"mode.omega_ph_ratio", Constraint::kPositive},
      {"mode.g_ghz", Constraint::kNonNegative},
      {"mode.g_ratio", Constraint::kNonNegative},
      {"mode.g_phase_rad", Constraint::kAny},
      {"mode.q", Constraint::kPositive},
      {"mode.temperature_k", Constraint::kNonNegative},
      {"mode.n0", Constraint::kNonNegative},
      {"dissipation.gamma_siv_mhz", Constraint::kNonNegative},
      {"dissipation.n_delta", Constraint::kNonNegative},
      {"bath.j0_times_delta", Constraint::kNonNegative},
      {"bath.width_over_delta", Constraint::kPositive},
      {"bath.cutoff_over_delta", Constraint::kPositive},
      {"bath.cross_mode", Constraint::kAny},
      {"meanfield.relaxation", Constraint::kAny},
      {"grid.bz_min_t", Constraint::kAny},
      {"grid.bz_max_t", Constraint::kAny},
      {"grid.bx_max_t", Constraint::kPositive},
      {"grid.b_max_t", Constraint::kPositive},
      {"grid.count", Constraint::kPositive},
      {"grid.g_ratios", Constraint::kAny},
      {"grid.t_min_k", Constraint::kPositive},
      {"grid.t_max_k", Constraint::kPositive},
      {"grid.alpha_min", Constraint::kPositive},
      {"grid.alpha_max", Constraint::kPositive},
      {"grid.temperatures_k", Constraint::kAny},
      {"grid.level_n", Constraint::kPositive},
      {"grid.level_m", Constraint::kPositive},
      {"numerics.window", Constraint::kPositive},
      {"numerics.samples", Constraint::kPositive},
      {"numerics.n_max", Constraint::kPositive},
      {"numerics.rtol", Constraint::kPositive},
      {"numerics.atol", Constraint::kPositive},
      {"numerics.samples_per_period", Constraint::kPositive},
      {"numerics.lattice_points", Constraint::kPositive},
      {"numerics.truncation_tol", Constraint::kPositive},
      {"optimizer.algorithm", Constraint::kAny},
      {"optimizer.pop", Constraint::kPositive},
      {"optimizer.generations", Constraint::kNonNegative},
      {"optimizer.f_weight", Constraint::kPositive},
      {"optimizer.cr", Constraint::kPositive},
      {"optimizer.seed", Constraint::kNonNegative},
      {"optimizer.top_k", Constraint::kNonNegative},
      {"optimizer.low_window", Constraint::kPositive},
      {"optimizer.low_samples", Constraint::kPositive},
      {"optimizer.high_window", Constraint::kPositive},
      {"optimizer.high_samples", Constraint::kPositive},
      {"output.path", Constraint::kAny},
      {"output.format", Constraint::kAny},
  };
  return s;
}

bool parse_double(const std::string& s, double& out) {
  std::string t = s;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  std::size_t b = 0;
  while (b < t.size() && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
  if (b < t.size() && t[b] == '+') ++b;
  const char* first = t.data() + b;
  const char* last = t.data() + t.size();
  if (first == last) return false;
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_value(const std::string& key, const std::string& value) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError("unknown key '" + key + "'");
  if (it->second == Constraint::kAny) return;
  double v = 0.0;
  if (!parse_double(value, v)) throw ConfigError("key '" + key + "' expects a number, got '" + value + "'");
  if (it->second == Constraint::kPositive && !(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
  if (it->second == Constraint::kNonNegative && !(v >= 0.0))
    throw ConfigError("key '" + key + "' must be non-negative");
}

}  // namespace

std::vector<std::string> schema_keys() {
  std::vector<std::string> k;
  for (const auto& [name, c] : schema()) k.push_back(name);
  return k;
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config c;
  c.origin_ = origin;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(origin + ": key '" + section + "' outside a section");
    for (const auto& [key, leaf] : body) c.set(section + "." + key, trim(leaf.data()));
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  check_value(key, value);
  values_[key] = value;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' needs section.key");
  set(key, trim(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& Config::raw(const std::string& key) {
  if (schema().count(key) == 0) throw ConfigError("internal: key '" + key + "' missing from schema");
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  consumed_.insert(key);
  resolved_[key] = it->second;
  return it->second;
}

double Config::number(const std::string& key) {
  double v = 0.0;
  if (!parse_double(raw(key), v)) throw ConfigError("key '" + key + "' expects a number");
  return v;
}

double Config::number_or(const std::string& key, double fallback) {
  if (has(key)) return number(key);
  std::ostringstream os;
  os.precision(17);
  os << fallback;
  resolved_[key] = os.str();
  return fallback;
}

long Config::integer(const std::string& key) {
  const double v = number(key);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "' expects an integer");
  return static_cast<long>(v);
}

long Config::integer_or(const std::string& key, long fallback) {
  if (has(key)) return integer(key);
  resolved_[key] = std::to_string(fallback);
  return fallback;
}

std::string Config::text(const std::string& key) { return raw(key); }

std::string Config::text_or(const std::string& key, const std::string& fallback) {
  if (has(key)) return text(key);
  resolved_[key] = fallback;
  return fallback;
}

std::vector<double> Config::list(const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_double(trim(item), v)) throw ConfigError("key '" + key + "' expects a comma separated list of numbers");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

std::string Config::one_of(const std::string& a, const std::string& b) {
  const bool ha = has(a), hb = has(b);
  if (ha == hb) throw ConfigError("exactly one of '" + a + "' and '" + b + "' must be given");
  return ha ? a : b;
}

void Config::require_all_consumed() const {
  std::string unused;
  for (const auto& [k, v] : values_) {
    if (consumed_.count(k) == 0) unused += (unused.empty() ? "" : ", ") + k;
  }
  if (!unused.empty()) throw ConfigError("keys not used by this experiment: " + unused);
}

std::string Config::resolved_text() const {
  std::ostringstream os;
  std::string current;
  for (const auto& [k, v] : resolved_) {
    const auto dot = k.find('.');
    const std::string section = k.substr(0, dot);
    if (section != current) {
      if (!current.empty()) os << "\n";
      os << "[" << section << "]\n";
      current = section;
    }
    os << k.substr(dot + 1) << " = " << v << "\n";
  }
  return os.str();
}

}  // namespace pnm::cli
