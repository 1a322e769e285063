#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zkeval/calibrate.hpp"
#include "zkeval/graph.hpp"
#include "zkeval/prover.hpp"

namespace zkeval {

// One measured prove of one model.
struct Measurement {
  std::string label;
  int64_t params = 0;
  int64_t macs = 0;
  uint64_t n_con = 0;
  uint64_t padded_rows = 0;
  double setup_seconds = 0.0;
  double witness_seconds = 0.0;
  double prove_seconds = 0.0;
  double verify_seconds = 0.0;
  uint64_t proof_bytes = 0;
  uint64_t pk_bytes = 0;
  uint64_t vk_bytes = 0;
  uint64_t peak_mem_bytes = 0;  // prover working set

  nlohmann::json to_json() const;
  static Measurement from_json(const nlohmann::json& j);
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double predict(double x) const { return intercept + slope * x; }
  nlohmann::json to_json() const;
  static LinearFit from_json(const nlohmann::json& j);
};

// Ordinary least squares. R^2 is 1 when y is constant and fitted exactly.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct MachineDescriptor {
  std::string hostname;
  std::string cpu;
  std::string compiler;
  int threads = 1;
  std::string timestamp;  // UTC, ISO 8601

  static MachineDescriptor current();
  nlohmann::json to_json() const;
  static MachineDescriptor from_json(const nlohmann::json& j);
};

struct CostCoefficients {
  LinearFit prove_time;       // seconds vs padded rows
  LinearFit pk_bytes;         // bytes vs padded rows
  LinearFit peak_mem;         // bytes vs padded rows
  LinearFit prove_time_ncon;  // seconds vs raw n_con, for comparison
  uint64_t points = 0;
  MachineDescriptor machine;

  nlohmann::json to_json() const;
  static CostCoefficients from_json(const nlohmann::json& j);
};

// Throws InsufficientData below three distinct padded-row counts.
CostCoefficients fit(std::span<const Measurement> ms);

struct CostEstimate {
  uint64_t n_con = 0;
  uint64_t padded_rows = 0;
  double prove_seconds = 0.0;
  double pk_bytes = 0.0;
  double peak_mem_bytes = 0.0;
  uint64_t dataset_size = 0;
  double dataset_seconds = 0.0;

  nlohmann::json to_json() const;
};

// Predictions at padded_rows; negative slopes are clamped to zero so the
// estimate never decreases with n_con.
CostEstimate estimate(const CostCoefficients& c, uint64_t n_con, uint64_t dataset_size);

struct MeasureOptions {
  size_t calibration_samples = 8;
  int repeats = 3;  // prove/verify repeats; the median is kept
  ProofMode mode = ProofMode::kSpotCheck;
  uint64_t seed = 1;
  std::optional<int> scale;  // fixed scale instead of a resources-mode search
};

// Calibrate, compile, set up, prove and verify one model on random inputs.
Measurement measure_model(const std::string& label, const Graph& g, const MeasureOptions& opts = {});

std::vector<Measurement> report_table(const std::vector<std::pair<std::string, Graph>>& models,
                                      const MeasureOptions& opts = {});
std::string format_table(std::span<const Measurement> rows);
std::string to_csv(std::span<const Measurement> rows);

}  // namespace zkeval
