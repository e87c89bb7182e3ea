#pragma once

#include <fstream>
#include <map>
#include <mutex>
#include <string>

#include "pnm/sweep.hpp"

namespace pnm {

// Append-only JSON-lines file with one self-describing record per point.
class CheckpointWriter {
 public:
  explicit CheckpointWriter(const std::string& path);
  void append(const PointRecord& r);

 private:
  std::ofstream out_;
  std::mutex mu_;
};

std::string record_to_json(const PointRecord& r);
PointRecord record_from_json(const std::string& line);

// Records keyed by point index; truncated trailing lines are ignored.
std::map<std::size_t, PointRecord> load_checkpoint(const std::string& path);

}  // namespace pnm
