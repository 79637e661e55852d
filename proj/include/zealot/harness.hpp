#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zealot/params.hpp"
#include "zealot/thresholds.hpp"
#include "zealot/tree.hpp"

namespace zealot::harness {

// Stateless seed splitting: distinct indices always give distinct streams for
// a fixed master seed, bit-exact across machines.
std::uint64_t replicate_seeds(std::uint64_t master, std::uint64_t index);

// Experiment description, parsed from a strict JSON schema: a versioned
// "schema" field is required, unknown keys are errors, and a seed must be
// given explicitly (no wall-clock seeding).
struct ExperimentConfig {
  int schema = 1;
  std::string kind;  // forward|cobra|duality-check|thresholds|nu0-scan|pc-scan|table-43
  std::uint64_t seed = 0;
  std::optional<std::string> out;

  std::optional<TreeSpec> tree;
  std::optional<ModelParams> params;
  std::optional<thresholds::GraphSpec> graph;
  double horizon = 0.0;
  std::uint32_t replicas = 1;
  std::string init = "root";  // root|all
  double sample_dt = 0.1;
  double window_start = 0.5;

  std::uint32_t instances = 1000;  // duality-check
  int depth = 5;

  double mu = 0.0;                // nu0-scan
  std::vector<double> q3_values;  // nu0-scan / table-43
  std::vector<double> mu_values;  // pc-scan / table-43

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load_file(const std::string& path);
  nlohmann::json to_json() const;  // canonical form, used for the digest
  std::string digest() const;      // fnv1a-64 over the canonical dump, hex
};

struct ResultRecord {
  std::string digest;
  std::string metric;
  double value = 0.0;
  std::optional<Estimate> estimate;
  std::map<std::string, bool> flags;
  double wall_ms = 0.0;

  nlohmann::json to_json() const;
};

// Dispatches the experiment, optionally writing <out>.csv and <out>.json
// atomically. CSV output is byte-reproducible for a given config; wall time
// lives only in the JSON summary.
std::vector<ResultRecord> run(const ExperimentConfig& config);

// Cross-product execution along one axis with per-cell derived seeds.
// Supported axes: q3, mu, horizon, replicas, depth, seed.
std::vector<ResultRecord> sweep(const ExperimentConfig& base, const std::string& axis,
                                const std::vector<double>& values);

// Reference values for the published two-degree nu(0) table; entries whose
// recomputation disagrees beyond 1e-6 are listed in the table-43 JSON
// summary as discrepancies instead of being matched.
struct NuTableEntry {
  double q3;
  double mu;
  double published;
};
const std::vector<NuTableEntry>& published_nu_table();

void write_text_atomic(const std::string& path, const std::string& contents);

}  // namespace zealot::harness
