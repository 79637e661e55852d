#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "zealot/params.hpp"
#include "zealot/tree.hpp"

namespace zealot {

// One mark of the graphical representation: a delta at `site` plus oriented
// arrows from `sources` (k = 0 is the pure-delta mark of rate p_0). The state
// of the site is replaced by the OR of the sources when the mark is applied.
struct Event {
  double time = 0.0;
  VertexId site = 0;
  std::vector<VertexId> sources;

  friend bool operator==(const Event&, const Event&) = default;
};

// Replayable realization of all per-site Poisson streams up to a horizon.
// Stream k at site x has rate p_0 (k = 0) or degree(x) * p_k; streams are
// keyed by (seed, site, k), so regeneration is bit-identical and per-site
// generation is independent. Boundary sites carry no events; they are frozen
// at 0 forwards and kill dual particles.
class EventLog {
 public:
  EventLog(const Tree& tree, const ModelParams& params, double horizon, std::uint64_t seed);
  static EventLog from_events(const Tree& tree, double horizon, std::vector<Event> events);

  const Tree& tree() const { return *tree_; }
  double horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return global_.size(); }
  const std::vector<Event>& global() const { return global_; }  // (time, site) order
  std::vector<const Event*> site_events(VertexId v) const;      // time order

  // "time site k source_1..source_k", one line per event, sorted by time;
  // times are printed with 17 significant digits so the round trip is exact
  void save(std::ostream& os) const;
  static EventLog load(std::istream& is, const Tree& tree);

 private:
  EventLog(const Tree& tree, double horizon, std::uint64_t seed)
      : tree_(&tree), horizon_(horizon), seed_(seed) {}
  void sort_and_validate();

  const Tree* tree_;
  double horizon_;
  std::uint64_t seed_ = 0;
  std::vector<Event> global_;
};

// State of the dual after flowing down the representation.
struct DualState {
  VertexSet particles;
  bool truncated = false;          // some lineage was killed at the boundary
  std::uint64_t boundary_kills = 0;
};

// xi_t^A: apply all events with time <= t in global order. Boundary vertices
// are frozen at 0 (members of A on the boundary are dropped). If
// `boundary_adjacent` is given it reports whether an occupied vertex ever had
// a truncated child, i.e. whether the restriction to the finite tree could
// bias the result.
VertexSet forward_state(const EventLog& log, const VertexSet& a, double t,
                        bool* boundary_adjacent = nullptr);

// zeta_s^{B,t}: process events with time in (t-s, t] in reverse order; a
// particle hit by an event is replaced by particles at the event's sources,
// coalescing on contact. Offspring landing on the boundary are killed and
// counted.
DualState dual_state(const EventLog& log, const VertexSet& b, double t, double s);

enum class CheckOutcome {
  consistent,    // the pathwise identity held
  inconclusive,  // it held, but a lineage met the boundary
  violated,      // the identity failed: implementation bug
};

struct DualityCheck {
  bool forward_hit = false;  // xi_t^A intersects B
  bool dual_hit = false;     // A intersects zeta_t^{B,t}
  bool truncated = false;
  CheckOutcome outcome() const {
    if (forward_hit != dual_hit) return CheckOutcome::violated;
    return truncated ? CheckOutcome::inconclusive : CheckOutcome::consistent;
  }
};

struct AdditivityCheck {
  bool equal = false;
  bool truncated = false;
  CheckOutcome outcome() const {
    if (!equal) return CheckOutcome::violated;
    return truncated ? CheckOutcome::inconclusive : CheckOutcome::consistent;
  }
};

// Pathwise duality on one realization: {xi_t^A hits B} = {A hits zeta_t^{B,t}}.
DualityCheck check_duality(const EventLog& log, const VertexSet& a, const VertexSet& b, double t);

// Pathwise additivity: xi_t over the union of parts equals the union of the
// xi_t over each part.
AdditivityCheck check_additivity(const EventLog& log, const std::vector<VertexSet>& parts,
                                 double t);

}  // namespace zealot
