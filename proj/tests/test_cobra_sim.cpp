#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "zealot/cobra_sim.hpp"
#include "zealot/rng.hpp"

using namespace zealot;

TEST_CASE("empty start stays empty") {
  Tree t = Tree::regular(3, 3);
  CobraSimulator cobra(t, ModelParams({0.5, 0.5}));
  CobraResult res = cobra.run(VertexSet{}, 5.0, 1);
  REQUIRE(res.extinction_time.has_value());
  CHECK(*res.extinction_time == 0.0);

  BrwSimulator brw(t, ModelParams({0.5, 0.5}));
  BrwResult bres = brw.run({}, 5.0, 1);
  CHECK(bres.final_positions.empty());
}

TEST_CASE("pure death: extinction of n particles has mean H_n") {
  // n independent Exp(1) lifetimes; the max has mean 1 + 1/2 + ... + 1/n
  Tree t = Tree::regular(3, 3);
  ModelParams death({1.0});
  const int n_particles = 5;
  // distinct sites: the root and four level-1/level-2 vertices
  VertexSet init{0, 1, 2, 3, 4};
  double expect = 0.0;
  for (int i = 1; i <= n_particles; ++i) expect += 1.0 / i;

  CobraSimulator cobra(t, death);
  const int reps = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    CobraResult res = cobra.run(init, 100.0, 100 + r);
    REQUIRE(res.extinction_time.has_value());
    sum += *res.extinction_time;
    sumsq += *res.extinction_time * *res.extinction_time;
  }
  double mean = sum / reps;
  double sd = std::sqrt(sumsq / reps - mean * mean);
  CHECK(std::abs(mean - expect) <= 3 * sd / std::sqrt(static_cast<double>(reps)));

  // the BRW with the same start behaves identically under pure death
  BrwSimulator brw(t, death);
  double bsum = 0.0;
  for (int r = 0; r < reps; ++r) {
    BrwResult res = brw.run({0, 1, 2, 3, 4}, 100.0, 900000 + r);
    REQUIRE(res.extinction_time.has_value());
    bsum += *res.extinction_time;
  }
  CHECK(std::abs(bsum / reps - expect) <= 3 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("cobra occupancy law matches the dual replay of event logs") {
  // two-sample chi-square on |zeta_t| at t = 1, 5% level, fixed seeds
  Tree t = Tree::regular(3, 6);
  ModelParams params({0.1, 0.4, 0.5});
  const int reps = 1000;
  const double horizon = 1.0;

  std::vector<int> direct, via_log;
  CobraSimulator cobra(t, params);
  CobraOptions one;
  one.sample_dt = horizon;  // a single grid point: the live count at the horizon
  for (int r = 0; r < reps; ++r) {
    CobraResult res = cobra.run(VertexSet{t.root()}, horizon, 50 + r, one);
    REQUIRE(res.traj.counts.size() >= 1);
    direct.push_back(static_cast<int>(res.traj.counts.back()));
  }
  for (int r = 0; r < reps; ++r) {
    EventLog log(t, params, horizon, 9000 + r);
    DualState ds = dual_state(log, VertexSet{t.root()}, horizon, horizon);
    via_log.push_back(static_cast<int>(ds.particles.size()));
  }

  // pooled bins: {0, 1, 2, 3, 4+}
  auto binned = [](const std::vector<int>& xs) {
    std::vector<double> bins(5, 0.0);
    for (int x : xs) bins[std::min(x, 4)] += 1.0;
    return bins;
  };
  std::vector<double> b1 = binned(direct), b2 = binned(via_log);
  double chi2 = 0.0;
  int dof = 0;
  for (std::size_t i = 0; i < b1.size(); ++i) {
    double pooled = (b1[i] + b2[i]) / 2.0;
    if (pooled < 5.0) continue;
    chi2 += (b1[i] - pooled) * (b1[i] - pooled) / pooled +
            (b2[i] - pooled) * (b2[i] - pooled) / pooled;
    ++dof;
  }
  // chi-square 95% quantiles for dof = 1..5
  const double q95[6] = {0.0, 3.84, 5.99, 7.81, 9.49, 11.07};
  REQUIRE(dof >= 1);
  CHECK(chi2 < q95[std::min(dof, 5)]);
}

TEST_CASE("shared log: cobra set is contained in brw support at all times") {
  Rng rng(606);
  for (int i = 0; i < 100; ++i) {
    Tree t = Tree::regular(3, 4);
    ModelParams params({0.2, 0.3, 0.5});
    double horizon = 1.5;
    EventLog log(t, params, horizon, rng.next());
    VertexSet init{t.root(), t.child(t.root(), 0)};
    std::vector<VertexId> brw_init(init.begin(), init.end());

    std::vector<std::vector<std::uint8_t>> cobra_states;
    cobra_from_log(log, init, horizon,
                   [&](double, const std::vector<std::uint8_t>& occ) {
                     cobra_states.push_back(occ);
                   });
    std::size_t idx = 0;
    bool dominated = true;
    brw_from_log(log, brw_init, horizon,
                 [&](double, const std::vector<std::uint64_t>& counts) {
                   if (idx < cobra_states.size()) {
                     for (VertexId v = 0; v < counts.size(); ++v)
                       if (cobra_states[idx][v] && counts[v] == 0) dominated = false;
                   }
                   ++idx;
                 });
    // the two replays fire on the same events: an event moves the cobra
    // particle iff it moves the brw stack
    REQUIRE(idx == cobra_states.size());
    REQUIRE(dominated);
  }
}

TEST_CASE("brw mean population follows the linear growth law") {
  // dE/dt = (d mu - alpha) E on the d-regular tree
  Tree t = Tree::regular(3, 10);
  ModelParams params({0.3, 0.3, 0.4});
  const double d = 3;
  const double alpha = d * (1 - params.p0()) + params.p0();
  const double rate = d * params.mu() - alpha;
  const double horizon = 1.0;
  BrwSimulator brw(t, params);
  BrwOptions opts;
  opts.record = false;
  const int reps = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    BrwResult res = brw.run({t.root()}, horizon, 7000 + r, opts);
    double n = static_cast<double>(res.final_positions.size());
    sum += n;
    sumsq += n * n;
  }
  double mean = sum / reps;
  double sd = std::sqrt(std::max(0.0, sumsq / reps - mean * mean));
  double expect = std::exp(rate * horizon);
  CHECK(std::abs(mean - expect) <= 3 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("brw population cap triggers the overflow guard") {
  Tree t = Tree::regular(3, 12);
  ModelParams params({0.0, 0.0, 0.0, 1.0});  // explosive: 3 offspring per event
  BrwSimulator brw(t, params);
  BrwOptions opts;
  opts.record = false;
  opts.population_cap = 500;
  CHECK_THROWS_AS(brw.run({t.root()}, 20.0, 3, opts), population_overflow_error);
}

TEST_CASE("mean root occupancy: closed form against simulation") {
  // d = 3, p2-weighted picks; exact DP versus the simulator's empirical mean
  for (double p0 : {0.0, 0.2}) {
    ModelParams params({p0, 0.0, 1.0 - p0});
    for (double horizon : {0.5, 1.0}) {
      double tail = 0.0;
      double expect = brw_mean_occupancy_root(3, params, horizon, 400, &tail);
      CHECK(tail <= 1e-9);

      Tree t = Tree::regular(3, 14);
      BrwSimulator brw(t, params);
      BrwOptions opts;
      opts.record = false;
      const int reps = 10000;
      double sum = 0.0, sumsq = 0.0;
      for (int r = 0; r < reps; ++r) {
        BrwResult res = brw.run({t.root()}, horizon, 40000 + r, opts);
        double n = static_cast<double>(res.root_occupancy);
        sum += n;
        sumsq += n * n;
      }
      double mean = sum / reps;
      double sd = std::sqrt(std::max(0.0, sumsq / reps - mean * mean));
      CHECK(std::abs(mean - expect) <= 3 * sd / std::sqrt(static_cast<double>(reps)));
    }
  }
}

TEST_CASE("mean root occupancy closed form: edge cases and bound") {
  ModelParams death({1.0});
  CHECK(brw_mean_occupancy_root(3, death, 0.0, 100) == 1.0);
  // pure death: exp(-t)
  CHECK(brw_mean_occupancy_root(3, death, 2.0, 100) == doctest::Approx(std::exp(-2.0)));
  // p1 = 1: plain random walk, m(t, 0) = P(S_t = 0) <= 1 and positive
  ModelParams walk({0.0, 1.0});
  double m = brw_mean_occupancy_root(3, walk, 1.0, 200);
  CHECK(m > 0.0);
  CHECK(m < 1.0);
  // the optimized exponential-moment bound holds across a parameter grid
  for (int d : {3, 4, 5}) {
    for (double p0 : {0.0, 0.2, 0.5}) {
      for (double t : {0.5, 1.0, 2.0}) {
        ModelParams params({p0, 0.5 * (1 - p0), 0.5 * (1 - p0)});
        double alpha = d * (1 - p0) + p0;
        double bound = std::exp((2.0 * std::sqrt(d - 1.0) * params.mu() - alpha) * t);
        CHECK(brw_mean_occupancy_root(d, params, t, 400) <= bound * (1 + 1e-9));
      }
    }
  }
  // a truncation too small for the horizon is a precision error
  CHECK_THROWS_AS(brw_mean_occupancy_root(3, walk, 1.0, 5), std::domain_error);
}

TEST_CASE("tagged particle moves toward the root with probability mu/d") {
  Tree t = Tree::regular(3, 16);
  ModelParams params({0.0, 0.5, 0.5});  // mu = 1.5
  Estimate e = toward_root_frequency(t, params, 100000, 99);
  double expect = params.mu() / 3.0;
  double sigma = std::sqrt(expect * (1 - expect) / 100000);
  CHECK(std::abs(e.point - expect) <= 3 * sigma);
}

TEST_CASE("tagged particle: forced parent pick when k equals the degree") {
  Tree t = Tree::regular(3, 12);
  ModelParams params({0.0, 0.0, 0.0, 1.0});  // k = 3 on a 3-regular tree
  TaggedWalk w = tagged_particle_walk(t, params, 2000, 5);
  CHECK(w.eligible_steps > 0);
  CHECK(w.toward_root_count == w.eligible_steps);
}

TEST_CASE("tagged particle guards") {
  Tree t = Tree::regular(3, 4);
  CHECK_THROWS_AS(tagged_particle_walk(t, ModelParams({0.1, 0.9}), 10, 1),
                  std::invalid_argument);
  TaggedWalk w = tagged_particle_walk(t, ModelParams({0.0, 1.0}), 0, 1);
  CHECK(w.positions.size() == 1);  // only the root, no steps
  // consecutive positions are neighbors
  TaggedWalk w2 = tagged_particle_walk(t, ModelParams({0.0, 1.0}), 500, 2);
  for (std::size_t i = 1; i < w2.positions.size(); ++i) {
    VertexId a = w2.positions[i - 1], b = w2.positions[i];
    CHECK((t.parent(a) == b || t.parent(b) == a));
  }
}

TEST_CASE("local survival frequency: dead and alive regimes") {
  TreeSpec spec = TreeSpec::regular(3, 8);
  Estimate dead = local_survival_frequency(spec, ModelParams({1.0}), 20.0, 200, 4);
  CHECK(dead.point == 0.0);
  Estimate alive =
      local_survival_frequency(spec, ModelParams({0.0, 0.0, 0.0, 1.0}), 20.0, 200, 4);
  CHECK(alive.point > 0.5);
}
