#include "zealot/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace zealot {

VertexSet::VertexSet(std::initializer_list<VertexId> ids) : ids_(ids) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

VertexSet::VertexSet(std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool VertexSet::contains(VertexId v) const {
  return std::binary_search(ids_.begin(), ids_.end(), v);
}

void VertexSet::insert(VertexId v) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
  if (it == ids_.end() || *it != v) ids_.insert(it, v);
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  std::vector<VertexId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

bool intersects(const VertexSet& a, const VertexSet& b) {
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

DegreeDist::DegreeDist(const std::map<int, double>& atoms) {
  double sum = 0.0;
  for (auto [deg, q] : atoms) {
    if (deg < 3 || deg > kMaxDegree)
      throw std::invalid_argument("DegreeDist: support must lie in {3.." +
                                  std::to_string(kMaxDegree) + "}");
    if (q < 0.0) throw std::invalid_argument("DegreeDist: negative atom");
    sum += q;
    if (q > 0.0) atoms_.emplace_back(deg, q);
  }
  if (atoms_.empty()) throw std::invalid_argument("DegreeDist: empty support");
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("DegreeDist: atoms must sum to 1");
}

DegreeDist DegreeDist::single(int degree) { return DegreeDist({{degree, 1.0}}); }

double DegreeDist::prob(int degree) const {
  for (auto [d, q] : atoms_)
    if (d == degree) return q;
  return 0.0;
}

int DegreeDist::sample(Rng& rng) const {
  if (atoms_.size() == 1) return atoms_.front().first;
  double u = rng.uniform01();
  double acc = 0.0;
  for (auto [d, q] : atoms_) {
    acc += q;
    if (u < acc) return d;
  }
  return atoms_.back().first;
}

namespace {

struct Builder {
  std::vector<VertexId> parent;
  std::vector<VertexId> first_child;
  std::vector<std::uint32_t> child_count;
  std::vector<std::uint16_t> degree;
  std::vector<std::uint16_t> level;
  std::vector<std::uint8_t> boundary;

  VertexId add(VertexId par, int deg, int lvl, bool bnd) {
    VertexId id = static_cast<VertexId>(parent.size());
    parent.push_back(par);
    first_child.push_back(0);
    child_count.push_back(0);
    degree.push_back(static_cast<std::uint16_t>(deg));
    level.push_back(static_cast<std::uint16_t>(lvl));
    boundary.push_back(bnd ? 1 : 0);
    return id;
  }
};

}  // namespace

Tree Tree::regular(int degree, int depth) {
  if (degree < 3 || degree > kMaxDegree)
    throw std::invalid_argument("regular tree: degree must be in [3," +
                                std::to_string(kMaxDegree) + "]");
  if (depth < 0) throw std::invalid_argument("regular tree: depth must be >= 0");

  Builder b;
  b.add(kNoVertex, degree, 0, depth == 0);
  VertexId head = 0;
  while (head < b.parent.size()) {
    VertexId v = head++;
    if (b.boundary[v]) continue;
    int lvl = b.level[v];
    int kids = (v == 0) ? degree : degree - 1;
    b.first_child[v] = static_cast<VertexId>(b.parent.size());
    b.child_count[v] = static_cast<std::uint32_t>(kids);
    for (int i = 0; i < kids; ++i) b.add(v, degree, lvl + 1, lvl + 1 == depth);
  }

  Tree t;
  t.parent_ = std::move(b.parent);
  t.first_child_ = std::move(b.first_child);
  t.child_count_ = std::move(b.child_count);
  t.degree_ = std::move(b.degree);
  t.level_ = std::move(b.level);
  t.boundary_ = std::move(b.boundary);
  t.depth_limit_ = depth;
  t.finalize();
  return t;
}

Tree Tree::galton_watson(const DegreeDist& dist, int depth, std::uint64_t seed) {
  if (depth < 0) throw std::invalid_argument("galton_watson: depth must be >= 0");
  Rng rng(derive_stream(mix64(seed), 0x6777ull));

  Builder b;
  b.add(kNoVertex, dist.sample(rng), 0, depth == 0);
  VertexId head = 0;
  while (head < b.parent.size()) {
    VertexId v = head++;
    if (b.boundary[v]) continue;
    int lvl = b.level[v];
    int kids = (v == 0) ? b.degree[v] : b.degree[v] - 1;
    b.first_child[v] = static_cast<VertexId>(b.parent.size());
    b.child_count[v] = static_cast<std::uint32_t>(kids);
    for (int i = 0; i < kids; ++i)
      b.add(v, dist.sample(rng), lvl + 1, lvl + 1 == depth);
  }

  Tree t;
  t.parent_ = std::move(b.parent);
  t.first_child_ = std::move(b.first_child);
  t.child_count_ = std::move(b.child_count);
  t.degree_ = std::move(b.degree);
  t.level_ = std::move(b.level);
  t.boundary_ = std::move(b.boundary);
  t.depth_limit_ = depth;
  t.finalize();
  return t;
}

void Tree::finalize() {
  const std::size_t n = parent_.size();
  boundary_child_.assign(n, 0);
  interior_.clear();
  min_degree_ = kMaxDegree + 1;
  max_degree_ = 0;
  depth_limit_ = 0;
  for (std::size_t v = 0; v < n; ++v) {
    min_degree_ = std::min(min_degree_, static_cast<int>(degree_[v]));
    max_degree_ = std::max(max_degree_, static_cast<int>(degree_[v]));
    depth_limit_ = std::max(depth_limit_, static_cast<int>(level_[v]));
    if (!boundary_[v]) interior_.push_back(static_cast<VertexId>(v));
    if (boundary_[v] && v != 0) boundary_child_[parent_[v]] = 1;
  }
  interior_count_ = interior_.size();
}

void Tree::check(VertexId v) const {
  if (v >= parent_.size()) throw std::out_of_range("unknown vertex id");
}

std::uint32_t Tree::neighbor_count(VertexId v) const {
  check(v);
  return child_count_[v] + (v != 0 ? 1 : 0);
}

VertexId Tree::neighbor(VertexId v, std::uint32_t i) const {
  return i < child_count_[v] ? first_child_[v] + i : parent_[v];
}

void Tree::save(std::ostream& os) const {
  for (std::size_t v = 0; v < parent_.size(); ++v) {
    long long par = (v == 0) ? -1 : static_cast<long long>(parent_[v]);
    os << v << ' ' << par << ' ' << degree_[v] << ' ' << int(boundary_[v]) << '\n';
  }
}

Tree Tree::load(std::istream& is) {
  Tree t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long id, par, deg;
    int bnd;
    if (!(ls >> id >> par >> deg >> bnd))
      throw std::invalid_argument("tree load: malformed line: " + line);
    if (id != static_cast<long long>(t.parent_.size()))
      throw std::invalid_argument("tree load: ids must be dense and in order");
    if (deg < 3 || deg > kMaxDegree)
      throw std::invalid_argument("tree load: degree out of range");
    if (id == 0) {
      if (par != -1) throw std::invalid_argument("tree load: root must have parent -1");
      t.parent_.push_back(kNoVertex);
      t.level_.push_back(0);
    } else {
      if (par < 0 || par >= id)
        throw std::invalid_argument("tree load: parent must precede child");
      t.parent_.push_back(static_cast<VertexId>(par));
      t.level_.push_back(static_cast<std::uint16_t>(t.level_[par] + 1));
    }
    t.first_child_.push_back(0);
    t.child_count_.push_back(0);
    t.degree_.push_back(static_cast<std::uint16_t>(deg));
    t.boundary_.push_back(bnd ? 1 : 0);
  }
  if (t.parent_.empty()) throw std::invalid_argument("tree load: empty input");

  // children of each vertex must form a contiguous, ascending id range
  for (std::size_t v = 1; v < t.parent_.size(); ++v) {
    VertexId p = t.parent_[v];
    if (t.child_count_[p] == 0) t.first_child_[p] = static_cast<VertexId>(v);
    else if (t.first_child_[p] + t.child_count_[p] != v)
      throw std::invalid_argument("tree load: children of a vertex must be contiguous");
    ++t.child_count_[p];
  }
  for (std::size_t v = 0; v < t.parent_.size(); ++v) {
    std::uint32_t realized = t.child_count_[v] + (v != 0 ? 1 : 0);
    if (t.boundary_[v]) {
      if (t.child_count_[v] != 0)
        throw std::invalid_argument("tree load: boundary vertex with children");
    } else if (realized != t.degree_[v]) {
      throw std::invalid_argument("tree load: interior vertex " + std::to_string(v) +
                                  " does not realize its intended degree");
    }
  }
  t.finalize();
  return t;
}

std::pair<VertexSet, VertexSet> frontier_sets(const Tree& tree, const VertexSet& a) {
  if (a.empty()) throw std::invalid_argument("frontier_sets: A must be nonempty");
  const std::size_t n = tree.size();
  std::vector<std::uint8_t> in_a(n, 0);
  for (VertexId v : a) {
    if (v >= n) throw std::out_of_range("frontier_sets: unknown vertex in A");
    if (tree.is_boundary(v))
      throw std::domain_error(
          "frontier_sets: A touches the boundary, truncated subtrees make the result unsound");
    in_a[v] = 1;
  }

  // touched[v] = subtree of v intersects A; children have larger ids, so a
  // single reverse sweep is a valid post-order
  std::vector<std::uint8_t> touched(n, 0);
  for (std::size_t v = n; v-- > 0;) {
    if (in_a[v]) {
      touched[v] = 1;
      continue;
    }
    for (std::uint32_t i = 0; i < tree.child_count(static_cast<VertexId>(v)); ++i) {
      if (touched[tree.child(static_cast<VertexId>(v), i)]) {
        touched[v] = 1;
        break;
      }
    }
  }

  VertexSet frontier, exterior;
  for (VertexId v : a) {
    bool on_frontier = false;
    for (std::uint32_t i = 0; i < tree.child_count(v); ++i) {
      VertexId c = tree.child(v, i);
      if (!touched[c]) {
        on_frontier = true;
        exterior.insert(c);
      }
    }
    if (on_frontier) frontier.insert(v);
  }
  return {std::move(frontier), std::move(exterior)};
}

Tree TreeSpec::make(std::uint64_t seed) const {
  if (auto* r = std::get_if<Regular>(&spec)) return Tree::regular(r->degree, r->depth);
  const auto& g = std::get<GaltonWatson>(spec);
  return Tree::galton_watson(g.dist, g.depth, seed);
}

std::string TreeSpec::label() const {
  if (auto* r = std::get_if<Regular>(&spec))
    return "regular(d=" + std::to_string(r->degree) + ",depth=" + std::to_string(r->depth) + ")";
  const auto& g = std::get<GaltonWatson>(spec);
  std::string s = "gw(depth=" + std::to_string(g.depth) + ",q={";
  bool first = true;
  for (auto [d, q] : g.dist.atoms()) {
    if (!first) s += ",";
    first = false;
    s += std::to_string(d) + ":" + std::to_string(q);
  }
  return s + "})";
}

}  // namespace zealot
