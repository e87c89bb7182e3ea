#include "pnm/checkpoint.hpp"

#include <cmath>
#include <limits>
#include "json.hpp"

#include "pnm/errors.hpp"

namespace pnm {

using nlohmann::json;

namespace {

// JSON has no infinities or NaN; encode them as strings.
json encode_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_double(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("checkpoint: bad number '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string record_to_json(const PointRecord& r) {
  json j;
  j["index"] = r.index;
  j["coords"] = r.coords;
  j["value"] = encode_double(r.value);
  j["seed"] = r.seed;
  j["evaluations"] = r.evaluations;
  j["wall_seconds"] = r.wall_seconds;
  j["status"] = r.status;
  j["message"] = r.message;
  return j.dump();
}

PointRecord record_from_json(const std::string& line) {
  const json j = json::parse(line);
  PointRecord r;
  r.index = j.at("index").get<std::size_t>();
  r.coords = j.at("coords").get<std::vector<double>>();
  r.value = decode_double(j.at("value"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.evaluations = j.at("evaluations").get<long>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.status = j.at("status").get<std::string>();
  r.message = j.at("message").get<std::string>();
  return r;
}

CheckpointWriter::CheckpointWriter(const std::string& path) : out_(path, std::ios::app) {
  if (!out_) throw ConfigError("checkpoint: cannot open '" + path + "' for appending");
}

void CheckpointWriter::append(const PointRecord& r) {
  const std::string line = record_to_json(r) + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line;
  out_.flush();
}

std::map<std::size_t, PointRecord> load_checkpoint(const std::string& path) {
  std::map<std::size_t, PointRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      PointRecord r = record_from_json(line);
      if (r.status == "ok" || r.status == "infinite") out[r.index] = std::move(r);
    } catch (const std::exception&) {
      // A partially written final line from an interrupted run.
    }
  }
  return out;
}

}  // namespace pnm
