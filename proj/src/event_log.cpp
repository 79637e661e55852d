#include "zealot/event_log.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "zealot/rng.hpp"

namespace zealot {

namespace {

constexpr std::uint64_t kLogSalt = 0x6c6f67ull;  // distinct key domain for log streams

bool event_before(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.site != b.site) return a.site < b.site;
  return a.sources.size() < b.sources.size();
}

}  // namespace

EventLog::EventLog(const Tree& tree, const ModelParams& params, double horizon,
                   std::uint64_t seed)
    : tree_(&tree), horizon_(horizon), seed_(seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("EventLog: horizon must be > 0");
  params.require_compatible(tree.min_degree());

  const std::uint64_t base = mix64(seed ^ kLogSalt);
  std::vector<std::uint32_t> idx;
  for (VertexId x : tree.interior()) {
    const std::uint64_t site_key = derive_stream(base, x);
    const int deg = tree.degree(x);
    for (std::size_t k = 0; k <= params.max_pick(); ++k) {
      const double rate = (k == 0) ? params.p0() : deg * params.p(k);
      if (rate <= 0.0) continue;
      Rng rng(derive_stream(site_key, k));
      double t = rng.exponential(rate);
      while (t <= horizon) {
        Event ev;
        ev.time = t;
        ev.site = x;
        if (k > 0) {
          // k distinct neighbors via partial Fisher-Yates over the list
          idx.resize(deg);
          for (int i = 0; i < deg; ++i) idx[i] = static_cast<std::uint32_t>(i);
          ev.sources.resize(k);
          for (std::size_t i = 0; i < k; ++i) {
            std::uint32_t j = i + rng.below(static_cast<std::uint32_t>(deg - i));
            std::swap(idx[i], idx[j]);
            ev.sources[i] = tree.neighbor(x, idx[i]);
          }
        }
        global_.push_back(std::move(ev));
        t += rng.exponential(rate);
      }
    }
  }
  sort_and_validate();
}

EventLog EventLog::from_events(const Tree& tree, double horizon, std::vector<Event> events) {
  if (!(horizon > 0.0)) throw std::invalid_argument("EventLog: horizon must be > 0");
  EventLog log(tree, horizon, 0);
  log.global_ = std::move(events);
  for (const Event& ev : log.global_) {
    if (!(ev.time > 0.0) || ev.time > horizon)
      throw std::invalid_argument("EventLog: event time outside (0, horizon]");
    if (ev.site >= tree.size() || tree.is_boundary(ev.site))
      throw std::invalid_argument("EventLog: event at an invalid site");
    for (std::size_t i = 0; i < ev.sources.size(); ++i) {
      bool adjacent = false;
      for (std::uint32_t j = 0; j < tree.neighbor_count(ev.site); ++j)
        if (tree.neighbor(ev.site, j) == ev.sources[i]) adjacent = true;
      if (!adjacent) throw std::invalid_argument("EventLog: source not a neighbor of site");
      for (std::size_t j = i + 1; j < ev.sources.size(); ++j)
        if (ev.sources[i] == ev.sources[j])
          throw std::invalid_argument("EventLog: duplicate sources");
    }
  }
  log.sort_and_validate();
  return log;
}

void EventLog::sort_and_validate() {
  std::stable_sort(global_.begin(), global_.end(), event_before);
  for (std::size_t i = 1; i < global_.size(); ++i) {
    if (global_[i].site == global_[i - 1].site && global_[i].time == global_[i - 1].time)
      throw std::invalid_argument("EventLog: per-site times must be strictly increasing");
  }
}

std::vector<const Event*> EventLog::site_events(VertexId v) const {
  if (v >= tree_->size()) throw std::out_of_range("EventLog: unknown vertex");
  std::vector<const Event*> out;
  for (const Event& ev : global_)
    if (ev.site == v) out.push_back(&ev);
  return out;
}

void EventLog::save(std::ostream& os) const {
  char buf[64];
  for (const Event& ev : global_) {
    std::snprintf(buf, sizeof buf, "%.17g", ev.time);
    os << buf << ' ' << ev.site << ' ' << ev.sources.size();
    for (VertexId s : ev.sources) os << ' ' << s;
    os << '\n';
  }
}

EventLog EventLog::load(std::istream& is, const Tree& tree) {
  std::vector<Event> events;
  std::string line;
  double horizon = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Event ev;
    std::size_t k = 0;
    if (!(ls >> ev.time >> ev.site >> k))
      throw std::invalid_argument("EventLog load: malformed line: " + line);
    ev.sources.resize(k);
    for (std::size_t i = 0; i < k; ++i)
      if (!(ls >> ev.sources[i]))
        throw std::invalid_argument("EventLog load: missing sources: " + line);
    horizon = std::max(horizon, ev.time);
    events.push_back(std::move(ev));
  }
  if (events.empty()) throw std::invalid_argument("EventLog load: empty input");
  return from_events(tree, horizon, std::move(events));
}

VertexSet forward_state(const EventLog& log, const VertexSet& a, double t,
                        bool* boundary_adjacent) {
  if (t < 0.0 || t > log.horizon())
    throw std::out_of_range("forward_state: t outside [0, horizon]");
  const Tree& tree = log.tree();
  std::vector<std::uint8_t> state(tree.size(), 0);
  bool adjacent = false;
  for (VertexId v : a) {
    if (v >= tree.size()) throw std::out_of_range("forward_state: unknown vertex in A");
    if (tree.is_boundary(v)) continue;  // frozen at 0
    state[v] = 1;
    adjacent |= tree.has_boundary_child(v);
  }
  for (const Event& ev : log.global()) {
    if (ev.time > t) break;
    std::uint8_t next = 0;
    for (VertexId s : ev.sources) next |= state[s];
    state[ev.site] = next;
    if (next) adjacent |= tree.has_boundary_child(ev.site);
  }
  std::vector<VertexId> out;
  for (VertexId v = 0; v < state.size(); ++v)
    if (state[v]) out.push_back(v);
  if (boundary_adjacent) *boundary_adjacent = adjacent;
  return VertexSet(std::move(out));
}

DualState dual_state(const EventLog& log, const VertexSet& b, double t, double s) {
  if (t < 0.0 || t > log.horizon())
    throw std::out_of_range("dual_state: t outside [0, horizon]");
  if (s < 0.0 || s > t) throw std::invalid_argument("dual_state: need 0 <= s <= t");
  const Tree& tree = log.tree();
  DualState result;
  std::vector<std::uint8_t> occupied(tree.size(), 0);
  for (VertexId v : b) {
    if (v >= tree.size()) throw std::out_of_range("dual_state: unknown vertex in B");
    if (tree.is_boundary(v)) {
      result.truncated = true;
      ++result.boundary_kills;
      continue;
    }
    occupied[v] = 1;
  }

  const auto& events = log.global();
  // window (t-s, t], processed in reverse
  auto lo = std::lower_bound(events.begin(), events.end(), t - s,
                             [](const Event& e, double v) { return e.time <= v; });
  auto hi = std::upper_bound(events.begin(), events.end(), t,
                             [](double v, const Event& e) { return v < e.time; });
  for (auto it = hi; it != lo;) {
    --it;
    const Event& ev = *it;
    if (!occupied[ev.site]) continue;
    occupied[ev.site] = 0;
    for (VertexId src : ev.sources) {
      if (tree.is_boundary(src)) {
        result.truncated = true;
        ++result.boundary_kills;
      } else {
        occupied[src] = 1;
      }
    }
  }
  std::vector<VertexId> out;
  for (VertexId v = 0; v < occupied.size(); ++v)
    if (occupied[v]) out.push_back(v);
  result.particles = VertexSet(std::move(out));
  return result;
}

DualityCheck check_duality(const EventLog& log, const VertexSet& a, const VertexSet& b,
                           double t) {
  DualityCheck check;
  VertexSet fwd = forward_state(log, a, t);
  check.forward_hit = intersects(fwd, b);
  DualState dual = dual_state(log, b, t, t);
  check.dual_hit = intersects(a, dual.particles);
  check.truncated = dual.truncated;
  return check;
}

AdditivityCheck check_additivity(const EventLog& log, const std::vector<VertexSet>& parts,
                                 double t) {
  AdditivityCheck check;
  VertexSet all;
  VertexSet union_of_states;
  bool adjacent = false;
  for (const VertexSet& part : parts) {
    all = set_union(all, part);
    bool adj = false;
    union_of_states = set_union(union_of_states, forward_state(log, part, t, &adj));
    adjacent |= adj;
  }
  bool adj = false;
  VertexSet joint = forward_state(log, all, t, &adj);
  adjacent |= adj;
  check.equal = (joint == union_of_states);
  check.truncated = adjacent;
  return check;
}

}  // namespace zealot
