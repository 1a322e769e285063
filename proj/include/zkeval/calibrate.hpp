#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zkeval/graph.hpp"

namespace zkeval {

enum class CalibrationMode { kAccuracy, kResources };

const char* mode_name(CalibrationMode m);
CalibrationMode mode_from_name(const std::string& s);

struct CalibrationOptions {
  int min_scale = 4;
  int max_scale = 16;
  double accuracy_bound = 0.01;
  double resources_bound = 0.05;
  double headroom = 2.0;
};

struct ScalePoint {
  int scale = 0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  bool overflow = false;
};

struct TableEstimate {
  std::string fn;
  int param = 0;
  int64_t lo = 0, hi = 0;
  uint64_t size = 0;
};

// The "settings" object produced before compilation.
struct CalibrationReport {
  CalibrationMode mode = CalibrationMode::kResources;
  int scale = 7;                                // global activation scale
  double error_bound = 0.05;                    // threshold the scale was chosen against
  double max_rel_error = 0.0;                   // observed at `scale`
  double mean_rel_error = 0.0;
  size_t sample_count = 0;
  std::map<std::string, int> node_scales;       // every node of the graph and its lowering
  std::map<std::string, int> weight_scales;
  std::map<std::string, double> ranges;         // max |value| per tensor with headroom applied
  std::vector<ScalePoint> sweep;
  std::vector<TableEstimate> tables;
  uint64_t n_con = 0;
  uint64_t padded_rows = 0;

  nlohmann::json to_json() const;
  static CalibrationReport from_json(const nlohmann::json& j);

  // Range of `ref` in raw units at `scale`, rounded outward.
  int64_t raw_bound(const std::string& ref, int at_scale) const;
};

// One calibration sample: a value per graph input.
using Sample = std::vector<Tensor>;

CalibrationReport calibrate(const Graph& g, const std::vector<Sample>& samples, CalibrationMode mode,
                            const CalibrationOptions& opts = {});

// Same report for a fixed scale (no search); used for sweeps and overrides.
CalibrationReport calibrate_at(const Graph& g, const std::vector<Sample>& samples, int scale,
                               const CalibrationOptions& opts = {});

}  // namespace zkeval
