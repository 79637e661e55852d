#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zealot/event_log.hpp"
#include "zealot/params.hpp"
#include "zealot/tree.hpp"

namespace zealot {

struct ForwardTrajectory {
  std::vector<double> times;
  std::vector<std::uint32_t> counts;
  std::vector<std::uint8_t> root_state;
  std::optional<double> extinction_time;
  bool boundary_touched = false;  // an occupied vertex had a truncated child
};

struct ForwardOptions {
  // > 0: record on a fixed time grid; 0: record after every event
  double sample_dt = 0.1;
  bool record = true;
};

// Where estimator replicas start from.
struct InitSpec {
  enum Kind { root, all_interior, explicit_set } kind = root;
  VertexSet set;

  static InitSpec from_root() { return {root, {}}; }
  static InitSpec from_all() { return {all_interior, {}}; }
  static InitSpec from_set(VertexSet s) { return {explicit_set, std::move(s)}; }
  VertexSet resolve(const Tree& tree) const;
};

// Event-driven simulation of the zealot voter model. Every interior site
// carries the constant stream rate p_0 + degree * (1 - p_0) of the graphical
// representation (the p_0 stream is a no-op on 0-sites), so the free-running
// simulation and a replay of a sampled event log are the same process; the
// free run never materializes a log. Boundary vertices are frozen at 0.
class ForwardSimulator {
 public:
  ForwardSimulator(const Tree& tree, const ModelParams& params);

  using Observer = std::function<void(double time, const std::vector<std::uint8_t>& state)>;

  ForwardTrajectory run(const VertexSet& init, double horizon, std::uint64_t seed,
                        const ForwardOptions& opts = {}, const Observer& observer = nullptr);
  ForwardTrajectory run_from_log(const EventLog& log, const VertexSet& init, double horizon,
                                 const ForwardOptions& opts = {},
                                 const Observer& observer = nullptr);

  const Tree& tree() const { return *tree_; }

 private:
  void reset(const VertexSet& init);
  bool apply(VertexId site, const VertexId* sources, std::size_t k);  // true if state changed

  template <class NextEvent>
  ForwardTrajectory drive(NextEvent&& next, double horizon, const ForwardOptions& opts,
                          const Observer& observer);

  const Tree* tree_;
  ModelParams params_;
  std::vector<double> cum_rate_;  // per interior site, for non-regular trees
  double total_rate_ = 0.0;
  bool uniform_rates_ = false;
  std::vector<double> pick_cum_;  // cumulative p_k over k >= 1

  std::vector<std::uint8_t> state_;
  std::uint32_t count_ = 0;
  bool boundary_touched_ = false;
};

// Fraction of replicas with xi_horizon != empty. Galton-Watson specs resample
// the tree per replica; regular specs build it once.
Estimate survival_probability(const TreeSpec& spec, const ModelParams& params,
                              const InitSpec& init, double horizon, std::uint32_t replicas,
                              std::uint64_t seed);

// Starting from all interior sites occupied, the fraction of time the root is
// occupied over [window_start * horizon, horizon], averaged over replicas.
// A local-survival proxy. Rejects horizons with fewer than ~10 expected root
// events.
Estimate root_occupation_frequency(const TreeSpec& spec, const ModelParams& params,
                                   double horizon, std::uint32_t replicas, std::uint64_t seed,
                                   double window_start = 0.5);

}  // namespace zealot
