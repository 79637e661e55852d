#include "zealot/cobra_sim.hpp"

#include <algorithm>
#include <cmath>

#include "zealot/rng.hpp"

namespace zealot {

namespace {
constexpr std::uint64_t kCobraSalt = 0x636f6272ull;
constexpr std::uint64_t kBrwSalt = 0x627277ull;
constexpr std::uint64_t kTagSalt = 0x746167ull;
constexpr std::uint64_t kTreeSalt = 0x74726565ull;

std::vector<double> make_pick_cum(const ModelParams& params) {
  std::vector<double> cum(params.max_pick() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k <= params.max_pick(); ++k) {
    acc += params.p(k);
    cum[k] = acc;
  }
  return cum;
}

std::size_t pick_k(const std::vector<double>& cum, double v) {
  std::size_t k = std::upper_bound(cum.begin() + 1, cum.end(), v) - cum.begin();
  return std::min(k, cum.size() - 1);
}

}  // namespace

CobraSimulator::CobraSimulator(const Tree& tree, const ModelParams& params)
    : tree_(&tree), params_(params), pick_cum_(make_pick_cum(params)) {
  params_.require_compatible(tree.min_degree());
}

CobraResult CobraSimulator::run(const VertexSet& init, double horizon, std::uint64_t seed,
                                const CobraOptions& opts) {
  if (!(horizon > 0.0)) throw std::invalid_argument("cobra: horizon must be > 0");
  const Tree& tree = *tree_;
  CobraResult res;

  std::vector<std::int32_t> pos(tree.size(), -1);
  std::vector<VertexId> occ;
  auto add = [&](VertexId v) {
    pos[v] = static_cast<std::int32_t>(occ.size());
    occ.push_back(v);
  };
  auto remove = [&](VertexId v) {
    std::int32_t i = pos[v];
    occ[i] = occ.back();
    pos[occ[i]] = i;
    occ.pop_back();
    pos[v] = -1;
  };
  auto visit_root = [&](double t) {
    ++res.root_visits_total;
    if (t >= opts.count_visits_from) ++res.root_visits_window;
  };

  for (VertexId v : init) {
    if (v >= tree.size()) throw std::out_of_range("cobra: unknown vertex in init");
    if (tree.is_boundary(v)) {
      res.truncated = true;
      ++res.boundary_kills;
      continue;
    }
    if (pos[v] < 0) {
      add(v);
      if (v == tree.root()) visit_root(0.0);
    }
  }

  const double lam_max = params_.site_rate(tree.max_degree());
  Rng rng(derive_stream(mix64(seed ^ kCobraSalt), 0));
  std::vector<VertexId> scratch(tree.max_degree());
  double t = 0.0;
  double next_sample = 0.0;

  auto push = [&](double now) {
    res.traj.times.push_back(now);
    res.traj.counts.push_back(static_cast<std::uint32_t>(occ.size()));
    res.traj.root_visits.push_back(res.root_visits_total);
  };
  auto grid_before = [&](double now) {
    if (!opts.record || opts.sample_dt <= 0.0) return;
    while (next_sample < now) {
      push(next_sample);
      next_sample += opts.sample_dt;
    }
  };
  auto event_record = [&](double now) {
    if (opts.record && opts.sample_dt <= 0.0) push(now);
  };
  auto flush = [&](double upto) {
    if (!opts.record || opts.sample_dt <= 0.0) return;
    while (next_sample <= upto + 1e-12) {
      push(next_sample);
      next_sample += opts.sample_dt;
    }
  };
  event_record(0.0);

  if (occ.empty()) {
    res.extinction_time = 0.0;
    flush(horizon);
    return res;
  }

  for (;;) {
    const std::size_t n = occ.size();
    t += rng.exponential(static_cast<double>(n) * lam_max);
    if (t > horizon) break;
    VertexId x = occ[rng.below(static_cast<std::uint32_t>(n))];
    const int deg = tree.degree(x);
    const double lam_x = params_.site_rate(deg);
    double u = rng.uniform01() * lam_max;
    if (u >= lam_x) continue;  // thinning for lower-degree sites
    grid_before(t);
    if (u < params_.p0()) {
      remove(x);
    } else {
      std::size_t k = pick_k(pick_cum_, (u - params_.p0()) / deg);
      remove(x);
      for (int j = 0; j < deg; ++j) scratch[j] = static_cast<VertexId>(j);
      for (std::size_t j = 0; j < k; ++j) {
        std::uint32_t m = j + rng.below(static_cast<std::uint32_t>(deg - j));
        std::swap(scratch[j], scratch[m]);
        VertexId y = tree.neighbor(x, scratch[j]);
        if (tree.is_boundary(y)) {
          res.truncated = true;
          ++res.boundary_kills;
          continue;
        }
        if (y == tree.root()) visit_root(t);
        if (pos[y] < 0) add(y);
      }
    }
    event_record(t);
    if (occ.empty()) {
      res.extinction_time = t;
      break;
    }
  }
  flush(horizon);
  return res;
}

BrwSimulator::BrwSimulator(const Tree& tree, const ModelParams& params)
    : tree_(&tree), params_(params), pick_cum_(make_pick_cum(params)) {
  params_.require_compatible(tree.min_degree());
}

BrwResult BrwSimulator::run(const std::vector<VertexId>& init, double horizon,
                            std::uint64_t seed, const BrwOptions& opts) {
  if (!(horizon > 0.0)) throw std::invalid_argument("brw: horizon must be > 0");
  const Tree& tree = *tree_;
  BrwResult res;

  std::vector<VertexId> particles;
  for (VertexId v : init) {
    if (v >= tree.size()) throw std::out_of_range("brw: unknown vertex in init");
    if (tree.is_boundary(v)) {
      res.truncated = true;
      ++res.boundary_kills;
      continue;
    }
    particles.push_back(v);
  }

  const double lam_max = params_.site_rate(tree.max_degree());
  Rng rng(derive_stream(mix64(seed ^ kBrwSalt), 0));
  std::vector<VertexId> scratch(tree.max_degree());
  double t = 0.0;
  double next_sample = 0.0;

  auto record = [&](double now, bool event_mode_point) {
    if (!opts.record) return;
    if (opts.sample_dt <= 0.0) {
      if (event_mode_point) {
        res.traj.times.push_back(now);
        res.traj.counts.push_back(particles.size());
      }
      return;
    }
    while (next_sample < now) {
      res.traj.times.push_back(next_sample);
      res.traj.counts.push_back(particles.size());
      next_sample += opts.sample_dt;
    }
  };
  auto flush = [&](double upto) {
    if (!opts.record || opts.sample_dt <= 0.0) return;
    while (next_sample <= upto + 1e-12) {
      res.traj.times.push_back(next_sample);
      res.traj.counts.push_back(particles.size());
      next_sample += opts.sample_dt;
    }
  };
  record(0.0, true);
  if (particles.empty()) res.extinction_time = 0.0;

  while (!particles.empty()) {
    const std::size_t n = particles.size();
    t += rng.exponential(static_cast<double>(n) * lam_max);
    if (t > horizon) break;
    const std::uint32_t i = rng.below(static_cast<std::uint32_t>(n));
    const VertexId x = particles[i];
    const int deg = tree.degree(x);
    const double lam_x = params_.site_rate(deg);
    double u = rng.uniform01() * lam_max;
    if (u >= lam_x) continue;
    record(t, false);
    particles[i] = particles.back();
    particles.pop_back();
    if (u >= params_.p0()) {
      std::size_t k = pick_k(pick_cum_, (u - params_.p0()) / deg);
      for (int j = 0; j < deg; ++j) scratch[j] = static_cast<VertexId>(j);
      for (std::size_t j = 0; j < k; ++j) {
        std::uint32_t m = j + rng.below(static_cast<std::uint32_t>(deg - j));
        std::swap(scratch[j], scratch[m]);
        VertexId y = tree.neighbor(x, scratch[j]);
        if (tree.is_boundary(y)) {
          res.truncated = true;
          ++res.boundary_kills;
          continue;
        }
        particles.push_back(y);
      }
      if (particles.size() > opts.population_cap)
        throw population_overflow_error("brw: population exceeded cap of " +
                                        std::to_string(opts.population_cap));
    }
    record(t, true);
    if (particles.empty()) {
      res.extinction_time = t;
      break;
    }
  }
  flush(horizon);
  for (VertexId v : particles)
    if (v == tree.root()) ++res.root_occupancy;
  res.final_positions = std::move(particles);
  return res;
}

VertexSet cobra_from_log(const EventLog& log, const VertexSet& init, double horizon,
                         const CobraLogObserver& observer, bool* truncated,
                         std::uint64_t* root_visits) {
  const Tree& tree = log.tree();
  if (horizon > log.horizon()) throw std::out_of_range("cobra_from_log: horizon beyond log");
  std::vector<std::uint8_t> occ(tree.size(), 0);
  bool trunc = false;
  std::uint64_t visits = 0;
  for (VertexId v : init) {
    if (v >= tree.size()) throw std::out_of_range("cobra_from_log: unknown vertex");
    if (tree.is_boundary(v)) {
      trunc = true;
      continue;
    }
    occ[v] = 1;
    if (v == tree.root()) ++visits;
  }
  for (const Event& ev : log.global()) {
    if (ev.time > horizon) break;
    if (!occ[ev.site]) continue;
    occ[ev.site] = 0;
    for (VertexId src : ev.sources) {
      if (tree.is_boundary(src)) {
        trunc = true;
      } else {
        if (src == tree.root()) ++visits;
        occ[src] = 1;
      }
    }
    if (observer) observer(ev.time, occ);
  }
  if (truncated) *truncated = trunc;
  if (root_visits) *root_visits = visits;
  std::vector<VertexId> out;
  for (VertexId v = 0; v < occ.size(); ++v)
    if (occ[v]) out.push_back(v);
  return VertexSet(std::move(out));
}

std::vector<std::uint64_t> brw_from_log(const EventLog& log, const std::vector<VertexId>& init,
                                        double horizon, const BrwLogObserver& observer,
                                        bool* truncated, std::uint64_t cap) {
  const Tree& tree = log.tree();
  if (horizon > log.horizon()) throw std::out_of_range("brw_from_log: horizon beyond log");
  std::vector<std::uint64_t> counts(tree.size(), 0);
  bool trunc = false;
  std::uint64_t total = 0;
  for (VertexId v : init) {
    if (v >= tree.size()) throw std::out_of_range("brw_from_log: unknown vertex");
    if (tree.is_boundary(v)) {
      trunc = true;
      continue;
    }
    ++counts[v];
    ++total;
  }
  for (const Event& ev : log.global()) {
    if (ev.time > horizon) break;
    const std::uint64_t m = counts[ev.site];
    if (m == 0) continue;
    counts[ev.site] = 0;
    total -= m;
    for (VertexId src : ev.sources) {
      if (tree.is_boundary(src)) {
        trunc = true;
      } else {
        counts[src] += m;
        total += m;
      }
    }
    if (total > cap)
      throw population_overflow_error("brw_from_log: population exceeded cap");
    if (observer) observer(ev.time, counts);
  }
  if (truncated) *truncated = trunc;
  return counts;
}

TaggedWalk tagged_particle_walk(const Tree& tree, const ModelParams& params,
                                std::uint64_t steps, std::uint64_t seed) {
  if (params.p0() > 0.0)
    throw std::invalid_argument("tagged_particle_walk: requires p_0 = 0");
  params.require_compatible(tree.min_degree());
  const std::vector<double> pick_cum = make_pick_cum(params);

  TaggedWalk walk;
  Rng rng(derive_stream(mix64(seed ^ kTagSalt), 0));
  std::vector<VertexId> scratch(tree.max_degree());
  VertexId cur = tree.root();
  walk.positions.push_back(cur);
  for (std::uint64_t s = 0; s < steps; ++s) {
    if (tree.is_boundary(cur)) break;  // no materialized children to branch onto
    const int deg = tree.degree(cur);
    std::size_t k = pick_k(pick_cum, rng.uniform01());
    // sample k distinct neighbor indices; index deg-1 is the parent for
    // non-root vertices (children occupy 0..deg-2)
    bool parent_hit = false;
    for (int j = 0; j < deg; ++j) scratch[j] = static_cast<VertexId>(j);
    for (std::size_t j = 0; j < k; ++j) {
      std::uint32_t m = j + rng.below(static_cast<std::uint32_t>(deg - j));
      std::swap(scratch[j], scratch[m]);
      if (cur != tree.root() && scratch[j] == static_cast<VertexId>(deg - 1)) parent_hit = true;
    }
    if (cur != tree.root()) ++walk.eligible_steps;
    VertexId next;
    if (parent_hit) {
      next = tree.parent(cur);
      ++walk.toward_root_count;
    } else {
      next = tree.neighbor(cur, scratch[rng.below(static_cast<std::uint32_t>(k))]);
    }
    cur = next;
    walk.positions.push_back(cur);
  }
  return walk;
}

Estimate toward_root_frequency(const Tree& tree, const ModelParams& params,
                               std::uint64_t events, std::uint64_t seed) {
  std::uint64_t toward = 0, eligible = 0, excursion = 0;
  while (eligible < events) {
    TaggedWalk w = tagged_particle_walk(tree, params, events - eligible + 1,
                                        derive_stream(seed, excursion++));
    toward += w.toward_root_count;
    eligible += w.eligible_steps;
    if (w.eligible_steps == 0 && w.positions.size() <= 1) break;  // degenerate tree
  }
  Estimate e = Estimate::from_fraction(toward, static_cast<std::uint32_t>(eligible), seed);
  return e;
}

Estimate local_survival_frequency(const TreeSpec& spec, const ModelParams& params,
                                  double horizon, std::uint32_t replicas, std::uint64_t seed,
                                  double window_start) {
  if (replicas < 1) throw std::invalid_argument("local_survival: replicas must be >= 1");
  if (!(window_start >= 0.0 && window_start < 1.0))
    throw std::invalid_argument("local_survival: window_start must be in [0,1)");
  CobraOptions opts;
  opts.record = false;
  opts.count_visits_from = window_start * horizon;

  std::optional<Tree> shared;
  std::optional<CobraSimulator> shared_sim;
  if (!spec.is_random()) {
    shared.emplace(spec.make(0));
    shared_sim.emplace(*shared, params);
  }
  std::uint64_t hits = 0, touched = 0;
  for (std::uint32_t r = 0; r < replicas; ++r) {
    std::optional<Tree> fresh;
    std::optional<CobraSimulator> fresh_sim;
    if (spec.is_random()) {
      fresh.emplace(spec.make(derive_stream(seed ^ kTreeSalt, r)));
      fresh_sim.emplace(*fresh, params);
    }
    CobraSimulator& sim = spec.is_random() ? *fresh_sim : *shared_sim;
    CobraResult res = sim.run(VertexSet{sim.tree().root()}, horizon, derive_stream(seed, r),
                              opts);
    if (res.root_visits_window > 0) ++hits;
    if (res.truncated) ++touched;
  }
  return Estimate::from_fraction(hits, replicas, seed,
                                 static_cast<double>(touched) / replicas);
}

double brw_mean_occupancy_root(int d, const ModelParams& params, double t, int truncation,
                               double* tail_bound) {
  if (d < 3) throw std::invalid_argument("brw_mean_occupancy_root: d must be >= 3");
  if (t < 0.0) throw std::invalid_argument("brw_mean_occupancy_root: t must be >= 0");
  if (truncation < 1) throw std::invalid_argument("brw_mean_occupancy_root: truncation >= 1");
  params.require_compatible(d);

  const double mu = params.mu();
  const double alpha = d * (1.0 - params.p0()) + params.p0();
  const double growth = std::exp((d * mu - alpha) * t);
  if (t == 0.0 || mu == 0.0) {
    if (tail_bound) *tail_bound = 0.0;
    return growth;  // the walk never leaves the root
  }

  const double lam = d * mu * t;
  if (lam > 700.0)
    throw std::domain_error("brw_mean_occupancy_root: horizon too large for stable weights");
  const int jumps = static_cast<int>(std::ceil(lam + 12.0 * std::sqrt(lam) + 30.0));
  const int reach = std::min(truncation, jumps);
  const double lost = std::pow(static_cast<double>(d - 1), -reach);
  if (lost > 1e-9)
    throw std::domain_error(
        "brw_mean_occupancy_root: truncation too small for the requested precision");
  if (tail_bound) *tail_bound = lost;

  // uniformized distance chain: mass beyond `reach` is dropped; it could only
  // return with probability <= (d-1)^(-reach)
  std::vector<double> p(reach + 1, 0.0), q(reach + 1, 0.0);
  p[0] = 1.0;
  double w = std::exp(-lam);
  double acc = w;  // n = 0 term
  const double up = static_cast<double>(d - 1) / d;
  const double down = 1.0 / d;
  for (int n = 1; n <= jumps; ++n) {
    std::fill(q.begin(), q.end(), 0.0);
    if (p[0] > 0.0) q[1] += p[0];
    for (int x = 1; x <= reach; ++x) {
      if (p[x] == 0.0) continue;
      if (x + 1 <= reach) q[x + 1] += p[x] * up;
      q[x - 1] += p[x] * down;
    }
    std::swap(p, q);
    w *= lam / n;
    acc += w * p[0];
  }
  return growth * acc;
}

}  // namespace zealot
