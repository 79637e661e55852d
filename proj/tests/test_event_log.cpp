#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "zealot/event_log.hpp"
#include "zealot/rng.hpp"

using namespace zealot;

namespace {

ModelParams pure_death() { return ModelParams({1.0}); }
ModelParams pure_pair() { return ModelParams({0.0, 0.0, 1.0}); }

// random nonempty subset of vertices with level <= max_level
VertexSet random_set(const Tree& t, Rng& rng, int max_level, double p = 0.3) {
  std::vector<VertexId> ids;
  std::vector<VertexId> pool;
  for (VertexId v = 0; v < t.size(); ++v)
    if (t.level(v) <= max_level) pool.push_back(v);
  for (VertexId v : pool)
    if (rng.uniform01() < p) ids.push_back(v);
  if (ids.empty()) ids.push_back(pool[rng.below(static_cast<std::uint32_t>(pool.size()))]);
  return VertexSet(std::move(ids));
}

}  // namespace

TEST_CASE("log preconditions") {
  Tree t = Tree::regular(3, 2);
  CHECK_THROWS_AS(EventLog(t, pure_death(), 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EventLog(t, pure_death(), -1.0, 1), std::invalid_argument);
  // p_k > 0 beyond the minimum degree is rejected
  ModelParams too_many({0.0, 0.0, 0.0, 0.0, 1.0});  // k = 4 on a degree-3 tree
  CHECK_THROWS_AS(EventLog(t, too_many, 1.0, 1), std::invalid_argument);
}

TEST_CASE("regeneration is bit-identical") {
  Tree t = Tree::regular(3, 3);
  ModelParams params({0.3, 0.3, 0.4});
  EventLog a(t, params, 5.0, 77);
  EventLog b(t, params, 5.0, 77);
  REQUIRE(a.size() == b.size());
  CHECK(a.global() == b.global());
  EventLog c(t, params, 5.0, 78);
  CHECK(a.global() != c.global());
}

TEST_CASE("per-site event counts are Poisson(T) when p0 = 1") {
  Tree t = Tree::regular(3, 2);
  const double horizon = 2.0;
  const int replicas = 10000;
  double total = 0.0;
  std::size_t interior = t.interior_count();
  for (int r = 0; r < replicas; ++r) {
    EventLog log(t, pure_death(), horizon, 1000 + r);
    total += static_cast<double>(log.size());
  }
  double mean_per_site = total / (replicas * interior);
  double sigma = std::sqrt(horizon / (replicas * interior));
  CHECK(std::abs(mean_per_site - horizon) <= 3 * sigma);
  // every event is a pure delta
  EventLog log(t, pure_death(), horizon, 5);
  for (const Event& ev : log.global()) CHECK(ev.sources.empty());
}

TEST_CASE("p2 = 1 events carry two distinct sources with uniform pairs") {
  Tree t = Tree::regular(3, 2);
  const double horizon = 40.0;
  std::map<std::pair<VertexId, VertexId>, int> pair_counts;
  int root_events = 0;
  double total_time = 0.0;
  for (int r = 0; r < 300; ++r) {
    EventLog log(t, pure_pair(), horizon, 9000 + r);
    total_time += horizon;
    for (const Event& ev : log.global()) {
      REQUIRE(ev.sources.size() == 2);
      REQUIRE(ev.sources[0] != ev.sources[1]);
      if (ev.site == t.root()) {
        ++root_events;
        auto p = std::minmax(ev.sources[0], ev.sources[1]);
        ++pair_counts[{p.first, p.second}];
      }
    }
  }
  // rate at a degree-3 site is 3
  double sigma_rate = std::sqrt(3.0 * total_time);
  CHECK(std::abs(root_events - 3.0 * total_time) <= 3 * sigma_rate);
  // three unordered pairs, each with frequency 1/3
  REQUIRE(pair_counts.size() == 3);
  for (auto& [pair, count] : pair_counts) {
    double expect = root_events / 3.0;
    double sigma = std::sqrt(root_events * (1.0 / 3) * (2.0 / 3));
    CHECK(std::abs(count - expect) <= 3 * sigma);
  }
}

TEST_CASE("offspring stream rates at a site are degree * p_k") {
  Tree t = Tree::regular(4, 2);
  ModelParams params({0.1, 0.2, 0.3, 0.4});
  double horizon = 30.0;
  int reps = 200;
  std::map<std::size_t, int> by_k;
  for (int r = 0; r < reps; ++r) {
    EventLog log(t, params, horizon, 333 + r);
    for (const Event& ev : log.global())
      if (ev.site == t.root()) ++by_k[ev.sources.size()];
  }
  double total_time = horizon * reps;
  for (std::size_t k = 0; k <= 3; ++k) {
    double rate = (k == 0) ? params.p0() : 4.0 * params.p(k);
    double expect = rate * total_time;
    CHECK(std::abs(by_k[k] - expect) <= 3 * std::sqrt(expect));
  }
}

TEST_CASE("forward state basics") {
  Tree t = Tree::regular(3, 2);
  // hand-built log: one copy event then one delta at the root
  VertexId y = t.child(t.root(), 0);
  std::vector<Event> events;
  events.push_back({0.5, t.root(), {y}});
  events.push_back({1.5, t.root(), {}});
  EventLog log = EventLog::from_events(t, 2.0, std::move(events));

  CHECK(forward_state(log, VertexSet{}, 2.0).empty());

  VertexSet from_y = forward_state(log, VertexSet{y}, 1.0);
  CHECK(from_y.contains(t.root()));
  CHECK(from_y.contains(y));

  // the delta kills the root again
  VertexSet late = forward_state(log, VertexSet{y}, 2.0);
  CHECK_FALSE(late.contains(t.root()));
  CHECK(late.contains(y));

  // pure delta kills an initial 1
  VertexSet self = forward_state(log, VertexSet{t.root()}, 2.0);
  CHECK_FALSE(self.contains(t.root()));

  CHECK_THROWS_AS(forward_state(log, VertexSet{y}, 3.0), std::out_of_range);
}

TEST_CASE("dual state basics") {
  Tree t = Tree::regular(3, 3);
  VertexId y = t.child(t.root(), 0);
  VertexId z = t.child(t.root(), 1);
  std::vector<Event> events;
  events.push_back({1.0, t.root(), {y, z}});
  EventLog log = EventLog::from_events(t, 2.0, std::move(events));

  // no events in the window: the particle stays put
  DualState still = dual_state(log, VertexSet{t.root()}, 0.9, 0.9);
  CHECK(still.particles == VertexSet{t.root()});

  // one reversed event sends the particle to both sources
  DualState branched = dual_state(log, VertexSet{t.root()}, 2.0, 2.0);
  CHECK(branched.particles == VertexSet{y, z});
  CHECK_FALSE(branched.truncated);

  // two particles pushed onto the same site merge
  std::vector<Event> events2;
  events2.push_back({0.5, y, {t.root()}});
  events2.push_back({1.0, z, {t.root()}});
  EventLog log2 = EventLog::from_events(t, 2.0, std::move(events2));
  DualState merged = dual_state(log2, VertexSet{y, z}, 2.0, 2.0);
  CHECK(merged.particles == VertexSet{t.root()});
  CHECK(merged.particles.size() == 1);

  CHECK_THROWS_AS(dual_state(log, VertexSet{y}, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("pure delta removes a dual particle") {
  Tree t = Tree::regular(3, 2);
  std::vector<Event> events;
  events.push_back({1.0, t.root(), {}});
  EventLog log = EventLog::from_events(t, 2.0, std::move(events));
  DualState gone = dual_state(log, VertexSet{t.root()}, 2.0, 2.0);
  CHECK(gone.particles.empty());
}

TEST_CASE("duality identity holds pathwise on randomized instances") {
  Rng rng(314);
  int truncated = 0;
  const int instances = 1000;
  for (int i = 0; i < instances; ++i) {
    Tree t = (i % 2 == 0) ? Tree::regular(3, 4)
                          : Tree::galton_watson(DegreeDist({{3, 0.5}, {4, 0.5}}), 4, rng.next());
    std::vector<double> w(4);
    double sum = 0;
    for (double& v : w) {
      v = rng.exponential(1.0);
      sum += v;
    }
    for (double& v : w) v /= sum;
    ModelParams params(w);
    double horizon = 0.2 + rng.uniform01();
    EventLog log(t, params, horizon, rng.next());
    VertexSet a = random_set(t, rng, 1);
    VertexSet b = random_set(t, rng, 1);
    DualityCheck dc = check_duality(log, a, b, horizon);
    REQUIRE(dc.forward_hit == dc.dual_hit);
    if (dc.truncated) ++truncated;
    REQUIRE(dc.outcome() != CheckOutcome::violated);
  }
  // margin keeps most instances conclusive
  CHECK(truncated < instances / 2);
}

TEST_CASE("duality trivial cases") {
  Tree t = Tree::regular(3, 3);
  ModelParams params({0.25, 0.25, 0.5});
  EventLog log(t, params, 1.0, 4);
  // A = everything, B = root
  std::vector<VertexId> all;
  for (VertexId v = 0; v < t.size(); ++v) all.push_back(v);
  DualityCheck dc = check_duality(log, VertexSet(all), VertexSet{t.root()}, 1.0);
  CHECK(dc.forward_hit == dc.dual_hit);
  // A empty: both indicators are 0
  DualityCheck dc2 = check_duality(log, VertexSet{}, VertexSet{t.root()}, 1.0);
  CHECK_FALSE(dc2.forward_hit);
  CHECK_FALSE(dc2.dual_hit);
}

TEST_CASE("additivity holds pathwise") {
  Rng rng(2718);
  for (int i = 0; i < 1000; ++i) {
    Tree t = Tree::regular(3, 4);
    ModelParams params({0.2, 0.3, 0.5});
    double horizon = 0.2 + rng.uniform01();
    EventLog log(t, params, horizon, rng.next());
    VertexSet a = random_set(t, rng, 2);
    std::vector<VertexSet> parts;
    for (VertexId v : a) parts.push_back(VertexSet{v});
    AdditivityCheck ac = check_additivity(log, parts, horizon);
    REQUIRE(ac.equal);
  }
  // degenerate partitions
  Tree t = Tree::regular(3, 3);
  EventLog log(t, ModelParams({0.5, 0.5}), 1.0, 9);
  VertexSet a{0, 1};
  CHECK(check_additivity(log, {a, VertexSet{}}, 1.0).equal);
  CHECK(check_additivity(log, {a}, 1.0).equal);
}

TEST_CASE("forward monotone in the initial set on a shared log") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    Tree t = Tree::regular(3, 4);
    ModelParams params({0.3, 0.4, 0.3});
    double horizon = 1.0;
    EventLog log(t, params, horizon, rng.next());
    VertexSet a = random_set(t, rng, 2);
    VertexSet extra = random_set(t, rng, 2);
    VertexSet a_prime = set_union(a, extra);
    for (double frac : {0.3, 0.7, 1.0}) {
      VertexSet small = forward_state(log, a, frac * horizon);
      VertexSet big = forward_state(log, a_prime, frac * horizon);
      REQUIRE(is_subset(small, big));
    }
  }
}

TEST_CASE("log text round trip is exact") {
  Tree t = Tree::regular(3, 3);
  ModelParams params({0.2, 0.4, 0.4});
  EventLog log(t, params, 3.0, 5150);
  std::stringstream ss;
  log.save(ss);
  EventLog back = EventLog::load(ss, t);
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    // bitwise equality of times survives the text round trip
    REQUIRE(log.global()[i].time == back.global()[i].time);
    REQUIRE(log.global()[i].site == back.global()[i].site);
    REQUIRE(log.global()[i].sources == back.global()[i].sources);
  }
}

TEST_CASE("site_events returns the per-site time-ordered view") {
  Tree t = Tree::regular(3, 2);
  ModelParams params({0.5, 0.5});
  EventLog log(t, params, 4.0, 31);
  for (VertexId v : t.interior()) {
    auto evs = log.site_events(v);
    for (std::size_t i = 1; i < evs.size(); ++i) REQUIRE(evs[i - 1]->time < evs[i]->time);
    for (auto* e : evs) REQUIRE(e->site == v);
  }
}

TEST_CASE("from_events validates structure") {
  Tree t = Tree::regular(3, 2);
  VertexId boundary = static_cast<VertexId>(t.size() - 1);
  CHECK_THROWS_AS(EventLog::from_events(t, 1.0, {{0.5, boundary, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EventLog::from_events(t, 1.0, {{0.5, t.root(), {t.root()}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EventLog::from_events(t, 1.0, {{1.5, t.root(), {}}}),
                  std::invalid_argument);
  VertexId c0 = t.child(t.root(), 0);
  CHECK_THROWS_AS(EventLog::from_events(t, 1.0, {{0.5, t.root(), {c0, c0}}}),
                  std::invalid_argument);
}
