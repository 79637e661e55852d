#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zealot/rng.hpp"

namespace zealot {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr int kMaxDegree = 1024;

// Sorted set of vertex ids.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<VertexId> ids);
  explicit VertexSet(std::vector<VertexId> ids);

  bool contains(VertexId v) const;
  void insert(VertexId v);
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<VertexId>& ids() const { return ids_; }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<VertexId> ids_;  // sorted, unique
};

VertexSet set_union(const VertexSet& a, const VertexSet& b);
bool intersects(const VertexSet& a, const VertexSet& b);
bool is_subset(const VertexSet& a, const VertexSet& b);

// Probability atoms {degree j -> q_j} with support in {3..kMaxDegree}.
class DegreeDist {
 public:
  explicit DegreeDist(const std::map<int, double>& atoms);
  static DegreeDist single(int degree);

  const std::vector<std::pair<int, double>>& atoms() const { return atoms_; }
  int min_degree() const { return atoms_.front().first; }
  int max_degree() const { return atoms_.back().first; }
  bool is_single_atom() const { return atoms_.size() == 1; }
  double prob(int degree) const;

  int sample(Rng& rng) const;

 private:
  std::vector<std::pair<int, double>> atoms_;  // sorted by degree, q > 0 entries only
};

// Rooted tree, materialized to a finite depth. Vertices carry dense ids in
// breadth-first order (root = 0), so the children of any vertex form a
// contiguous id range. Vertices at the depth limit are marked as boundary:
// they store their intended degree but their children were truncated.
class Tree {
 public:
  // root gets d children, every other interior vertex d-1, truncated at `depth`
  static Tree regular(int degree, int depth);
  // root draws degree j with probability q_j and gets j children; non-root
  // vertices draw j and get j-1 children; deterministic given seed
  static Tree galton_watson(const DegreeDist& dist, int depth, std::uint64_t seed);

  // Line format: "id parent_id intended_degree is_boundary", parent_id of the
  // root is -1. Ids must be dense and parents must precede children.
  void save(std::ostream& os) const;
  static Tree load(std::istream& is);

  std::size_t size() const { return parent_.size(); }
  VertexId root() const { return 0; }
  VertexId parent(VertexId v) const { check(v); return parent_[v]; }  // kNoVertex for root
  std::uint32_t child_count(VertexId v) const { check(v); return child_count_[v]; }
  VertexId child(VertexId v, std::uint32_t i) const { return first_child_[v] + i; }
  int degree(VertexId v) const { check(v); return degree_[v]; }  // intended degree
  int level(VertexId v) const { check(v); return level_[v]; }
  bool is_boundary(VertexId v) const { check(v); return boundary_[v] != 0; }
  bool has_boundary_child(VertexId v) const { check(v); return boundary_child_[v] != 0; }
  int depth_limit() const { return depth_limit_; }
  int min_degree() const { return min_degree_; }
  int max_degree() const { return max_degree_; }
  std::size_t interior_count() const { return interior_count_; }
  const std::vector<VertexId>& interior() const { return interior_; }

  // Realized neighbor list: children first (id order), then the parent.
  // Interior vertices realize their intended degree; boundary vertices only
  // have their parent.
  std::uint32_t neighbor_count(VertexId v) const;
  VertexId neighbor(VertexId v, std::uint32_t i) const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  Tree() = default;
  void finalize();  // derives levels stats, boundary-child flags, interior list
  void check(VertexId v) const;

  std::vector<VertexId> parent_;
  std::vector<VertexId> first_child_;
  std::vector<std::uint32_t> child_count_;
  std::vector<std::uint16_t> degree_;
  std::vector<std::uint16_t> level_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::uint8_t> boundary_child_;
  std::vector<VertexId> interior_;
  int depth_limit_ = 0;
  int min_degree_ = 0;
  int max_degree_ = 0;
  std::size_t interior_count_ = 0;
};

// F(A): members of A that have a child whose subtree is disjoint from A.
// H(A): all such children. A must be nonempty and stay off the boundary,
// otherwise the truncated subtrees would make the answer unsound.
std::pair<VertexSet, VertexSet> frontier_sets(const Tree& tree, const VertexSet& a);

// Tree construction recipe used by estimators: a regular tree is built once,
// a Galton-Watson tree is resampled per replica.
struct TreeSpec {
  struct Regular {
    int degree;
    int depth;
  };
  struct GaltonWatson {
    DegreeDist dist;
    int depth;
  };
  std::variant<Regular, GaltonWatson> spec;

  static TreeSpec regular(int degree, int depth) { return {Regular{degree, depth}}; }
  static TreeSpec galton_watson(DegreeDist dist, int depth) {
    return {GaltonWatson{std::move(dist), depth}};
  }
  bool is_random() const { return std::holds_alternative<GaltonWatson>(spec); }
  Tree make(std::uint64_t seed) const;
  std::string label() const;
};

}  // namespace zealot
