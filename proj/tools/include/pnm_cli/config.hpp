#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pnm::cli {

enum class Constraint { kAny, kPositive, kNonNegative };

// Flat sectioned key=value configuration with a fixed schema. Keys are
// addressed as "section.key". Unknown keys and malformed numbers are
// rejected on load; every key must be consumed by the experiment.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text, const std::string& origin = "<text>");

  // "section.key=value"; the key must belong to the schema.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  long integer(const std::string& key);
  long integer_or(const std::string& key, long fallback);
  std::string text(const std::string& key);
  std::string text_or(const std::string& key, const std::string& fallback);
  std::vector<double> list(const std::string& key);

  // Exactly one of the two keys must be present; returns which one.
  std::string one_of(const std::string& a, const std::string& b);

  void require_all_consumed() const;

  // Every value the run used, including numeric defaults, as sorted INI text.
  std::string resolved_text() const;
  std::map<std::string, std::string> resolved() const { return resolved_; }
  const std::string& origin() const { return origin_; }

 private:
  void set(const std::string& key, const std::string& value);
  const std::string& raw(const std::string& key);

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
  std::string origin_;
};

// Names of all schema keys, for help output.
std::vector<std::string> schema_keys();

}  // namespace pnm::cli
