#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zealot/event_log.hpp"
#include "zealot/forward_sim.hpp"
#include "zealot/params.hpp"
#include "zealot/tree.hpp"

namespace zealot {

class population_overflow_error : public std::runtime_error {
 public:
  explicit population_overflow_error(const std::string& what) : std::runtime_error(what) {}
};

struct CobraTrajectory {
  std::vector<double> times;
  std::vector<std::uint32_t> counts;
  std::vector<std::uint64_t> root_visits;  // cumulative
};

struct CobraOptions {
  double sample_dt = 0.1;  // > 0: fixed grid; 0: every event
  bool record = true;
  double count_visits_from = 0.0;  // window start for root_visits_window
};

struct CobraResult {
  CobraTrajectory traj;
  std::uint64_t root_visits_total = 0;
  std::uint64_t root_visits_window = 0;
  std::uint64_t boundary_kills = 0;
  bool truncated = false;
  std::optional<double> extinction_time;
};

// Coalescing branching random walk, the dual of the zealot voter model. A
// particle at x dies at rate p_0; at rate degree(x) * p_k it dies leaving
// offspring on k distinct uniform neighbors, merging with whatever is already
// there. Offspring landing on the truncation boundary are killed and counted.
class CobraSimulator {
 public:
  CobraSimulator(const Tree& tree, const ModelParams& params);
  CobraResult run(const VertexSet& init, double horizon, std::uint64_t seed,
                  const CobraOptions& opts = {});
  const Tree& tree() const { return *tree_; }

 private:
  const Tree* tree_;
  ModelParams params_;
  std::vector<double> pick_cum_;
};

struct BrwTrajectory {
  std::vector<double> times;
  std::vector<std::uint64_t> counts;
};

struct BrwOptions {
  double sample_dt = 0.1;
  bool record = true;
  std::uint64_t population_cap = 1'000'000;
};

struct BrwResult {
  BrwTrajectory traj;
  std::vector<VertexId> final_positions;  // multiset of live particles at the horizon
  std::uint64_t root_occupancy = 0;       // particles sitting on the root at the horizon
  std::uint64_t boundary_kills = 0;
  bool truncated = false;
  std::optional<double> extinction_time;
};

// Same branching dynamics without coalescence: particles are independent and
// multiplicities accumulate. Dominates the COBRA. Aborts with
// population_overflow_error beyond the configured cap.
class BrwSimulator {
 public:
  BrwSimulator(const Tree& tree, const ModelParams& params);
  BrwResult run(const std::vector<VertexId>& init, double horizon, std::uint64_t seed,
                const BrwOptions& opts = {});
  const Tree& tree() const { return *tree_; }

 private:
  const Tree* tree_;
  ModelParams params_;
  std::vector<double> pick_cum_;
};

// Replays of a shared event log, the coupling under which the COBRA occupied
// set is contained in the BRW support at all times. Events run forward in
// time here: a mark at an occupied site replaces its particles by offspring
// at the mark's sources.
struct LogReplayResult {
  VertexSet cobra_final;
  std::vector<std::uint64_t> brw_final;  // per-vertex multiplicities
  std::uint64_t cobra_root_visits = 0;
  bool truncated = false;
};

using CobraLogObserver =
    std::function<void(double time, const std::vector<std::uint8_t>& occupied)>;
using BrwLogObserver =
    std::function<void(double time, const std::vector<std::uint64_t>& counts)>;

VertexSet cobra_from_log(const EventLog& log, const VertexSet& init, double horizon,
                         const CobraLogObserver& observer = nullptr, bool* truncated = nullptr,
                         std::uint64_t* root_visits = nullptr);
std::vector<std::uint64_t> brw_from_log(const EventLog& log, const std::vector<VertexId>& init,
                                        double horizon, const BrwLogObserver& observer = nullptr,
                                        bool* truncated = nullptr,
                                        std::uint64_t cap = 1'000'000);

// One tagged dual lineage with p_0 = 0: at each branching event, follow the
// offspring on the parent side when there is one, otherwise a uniform
// offspring. Stops early if it reaches the truncation boundary.
struct TaggedWalk {
  std::vector<VertexId> positions;       // consecutive entries are neighbors
  std::uint64_t toward_root_count = 0;   // moves onto the parent
  std::uint64_t eligible_steps = 0;      // steps taken from a non-root vertex
};

TaggedWalk tagged_particle_walk(const Tree& tree, const ModelParams& params,
                                std::uint64_t steps, std::uint64_t seed);

// Aggregates tagged walks (restarting from the root whenever the boundary
// ends one) until `events` eligible steps have been observed; the per-step
// toward-root law is exactly mu/d(x) regardless of restarts.
Estimate toward_root_frequency(const Tree& tree, const ModelParams& params,
                               std::uint64_t events, std::uint64_t seed);

// Fraction of COBRA replicas started from the root whose root-visit count in
// [window_start * horizon, horizon] is positive; a finite-horizon proxy for
// local survival.
Estimate local_survival_frequency(const TreeSpec& spec, const ModelParams& params,
                                  double horizon, std::uint32_t replicas, std::uint64_t seed,
                                  double window_start = 0.5);

// Expected number of BRW particles at the root at time t on the d-regular
// tree: m(t, root) = exp((d mu - alpha) t) P(S_t = root) with
// alpha = d(1 - p_0) + p_0, where S is the rate-(d mu) uniform-neighbor walk.
// P(S_t = root) is computed by uniformized dynamic programming on the
// distance chain (0 -> 1 surely; x -> x+1 w.p. (d-1)/d, x -> x-1 w.p. 1/d),
// truncated at `truncation` with the lost-return-mass bound (d-1)^(-truncation)
// reported through `tail_bound`.
double brw_mean_occupancy_root(int d, const ModelParams& params, double t, int truncation,
                               double* tail_bound = nullptr);

}  // namespace zealot
