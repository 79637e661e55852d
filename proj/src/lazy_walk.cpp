#include "zealot/lazy_walk.hpp"

#include <algorithm>
#include <stdexcept>

namespace zealot {

LazyTree::LazyTree(const DegreeDist& dist, int center_degree, Rng* rng)
    : dist_(&dist), rng_(rng) {
  if (center_degree < 3 || center_degree > kMaxDegree)
    throw std::invalid_argument("LazyTree: center degree out of range");
  parent_.push_back(kNone);
  depth_.push_back(0);
  degree_.push_back(static_cast<std::int16_t>(center_degree));
  children_.emplace_back(static_cast<std::size_t>(center_degree), kNone);
}

LazyTree::NodeId LazyTree::create(NodeId parent) {
  NodeId id = static_cast<NodeId>(parent_.size());
  int deg = dist_->sample(*rng_);
  parent_.push_back(parent);
  depth_.push_back(depth_[parent] + 1);
  degree_.push_back(static_cast<std::int16_t>(deg));
  children_.emplace_back(static_cast<std::size_t>(deg - 1), kNone);  // slot 0 is the parent
  return id;
}

LazyTree::NodeId LazyTree::neighbor(NodeId v, int i) {
  if (v != 0 && i == 0) return parent_[v];
  const int slot = (v == 0) ? i : i - 1;
  NodeId& c = children_[v][slot];
  if (c == kNone) c = create(v);
  return c;
}

int LazyTree::distance(NodeId a, NodeId b) const {
  int d = 0;
  while (a != b) {
    if (depth_[a] < depth_[b]) std::swap(a, b);
    a = parent_[a];
    ++d;
  }
  return d;
}

namespace {

// walkers move at rate 1 each; merged walkers are dropped from the list
struct WalkerSet {
  std::vector<LazyTree::NodeId> pos;

  bool all_pairs_beyond(const LazyTree& t, int cutoff) const {
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = i + 1; j < pos.size(); ++j)
        if (t.distance(pos[i], pos[j]) <= cutoff) return false;
    return true;
  }
};

}  // namespace

int coalescing_survivors(const DegreeDist& dist, int m, int k, double horizon, Rng& rng,
                         const CoalescingWalkOptions& opts) {
  if (k < 1 || k > m) throw std::invalid_argument("coalescing_survivors: need 1 <= k <= m");
  LazyTree tree(dist, m, &rng);

  WalkerSet w;
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  for (int j = 0; j < k; ++j) {
    int r = j + static_cast<int>(rng.below(static_cast<std::uint32_t>(m - j)));
    std::swap(idx[j], idx[r]);
    w.pos.push_back(tree.neighbor(0, idx[j]));
  }
  if (k == 1) return 1;

  double t = 0.0;
  std::uint64_t since_check = 0;
  for (;;) {
    const std::size_t n = w.pos.size();
    if (n == 1) return 1;
    t += rng.exponential(static_cast<double>(n));
    if (t > horizon) break;
    const std::uint32_t i = rng.below(static_cast<std::uint32_t>(n));
    LazyTree::NodeId v = w.pos[i];
    w.pos[i] = tree.neighbor(v, static_cast<int>(rng.below(
                                    static_cast<std::uint32_t>(tree.degree(v)))));
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && w.pos[j] == w.pos[i]) {  // coalesce
        w.pos[i] = w.pos.back();
        w.pos.pop_back();
        break;
      }
    }
    if (++since_check >= 16) {
      since_check = 0;
      if (w.all_pairs_beyond(tree, opts.stop_distance)) break;
    }
  }
  return static_cast<int>(w.pos.size());
}

Estimate pair_coalescence_probability(int d, int distance, double horizon,
                                      std::uint32_t replicas, std::uint64_t seed,
                                      const CoalescingWalkOptions& opts) {
  if (d < 3) throw std::invalid_argument("pair_coalescence: d must be >= 3");
  if (distance < 0) throw std::invalid_argument("pair_coalescence: distance must be >= 0");
  if (replicas < 1) throw std::invalid_argument("pair_coalescence: replicas must be >= 1");
  const DegreeDist dist = DegreeDist::single(d);

  std::uint64_t hits = 0;
  for (std::uint32_t r = 0; r < replicas; ++r) {
    Rng rng(derive_stream(mix64(seed ^ 0x70616972ull), r));
    if (distance == 0) {
      ++hits;  // already met
      continue;
    }
    LazyTree tree(dist, d, &rng);
    LazyTree::NodeId a = 0;
    LazyTree::NodeId b = 0;
    for (int s = 0; s < distance; ++s) b = tree.neighbor(b, b == 0 ? 0 : 1);
    double t = 0.0;
    const int cutoff = opts.stop_distance + distance;
    std::uint64_t since_check = 0;
    for (;;) {
      t += rng.exponential(2.0);
      if (t > horizon) break;
      if (rng.below(2) == 0) {
        a = tree.neighbor(a, static_cast<int>(rng.below(
                                 static_cast<std::uint32_t>(tree.degree(a)))));
      } else {
        b = tree.neighbor(b, static_cast<int>(rng.below(
                                 static_cast<std::uint32_t>(tree.degree(b)))));
      }
      if (a == b) {
        ++hits;
        break;
      }
      if (++since_check >= 16) {
        since_check = 0;
        if (tree.distance(a, b) > cutoff) break;  // a return from here is (d-1)^-cutoff unlikely
      }
    }
  }
  return Estimate::from_fraction(hits, replicas, seed);
}

}  // namespace zealot
