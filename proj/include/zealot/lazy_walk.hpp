#pragma once

#include <cstdint>
#include <vector>

#include "zealot/params.hpp"
#include "zealot/rng.hpp"
#include "zealot/tree.hpp"

namespace zealot {

// Rooted tree grown on demand while walkers explore it: a vertex draws its
// degree from the distribution when it is first created, and children
// materialize when first stepped onto. Memory stays proportional to the
// number of jumps, which is what makes long-horizon coalescing walks on
// effectively infinite trees feasible.
class LazyTree {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kNone = 0xffffffffu;

  // the center vertex gets `center_degree` neighbors, all further vertices
  // draw their degree from `dist`
  LazyTree(const DegreeDist& dist, int center_degree, Rng* rng);

  NodeId center() const { return 0; }
  int degree(NodeId v) const { return degree_[v]; }
  int depth(NodeId v) const { return depth_[v]; }
  NodeId parent(NodeId v) const { return parent_[v]; }

  // neighbor index i in [0, degree): index 0 is the parent for non-center
  // vertices; the center has only children
  NodeId neighbor(NodeId v, int i);

  int distance(NodeId a, NodeId b) const;
  std::size_t created() const { return degree_.size(); }

 private:
  NodeId create(NodeId parent);

  const DegreeDist* dist_;
  Rng* rng_;
  std::vector<NodeId> parent_;
  std::vector<std::int32_t> depth_;
  std::vector<std::int16_t> degree_;
  std::vector<std::vector<NodeId>> children_;
};

struct CoalescingWalkOptions {
  // once every pairwise distance exceeds this, further coalescence has
  // probability below (d_min-1)^-stop_distance and the run is settled early
  int stop_distance = 40;
};

// k independent rate-1 walks started on k distinct uniform neighbors of a
// degree-m center on a Galton-Watson tree; walks merge on contact. Returns
// the number of survivors at the horizon.
int coalescing_survivors(const DegreeDist& dist, int m, int k, double horizon, Rng& rng,
                         const CoalescingWalkOptions& opts = {});

// Two rate-1 walks on the d-regular tree started at the given distance:
// fraction of replicas in which they meet before the horizon.
Estimate pair_coalescence_probability(int d, int distance, double horizon,
                                      std::uint32_t replicas, std::uint64_t seed,
                                      const CoalescingWalkOptions& opts = {});

}  // namespace zealot
