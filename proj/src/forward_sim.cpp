#include "zealot/forward_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zealot/rng.hpp"

namespace zealot {

namespace {
constexpr std::uint64_t kForwardSalt = 0x666f7277ull;
constexpr std::uint64_t kTreeSalt = 0x74726565ull;

struct Recorder {
  const ForwardOptions* opts;
  ForwardTrajectory traj;
  double next_sample = 0.0;

  void start(double t0, std::uint32_t count, std::uint8_t root) {
    if (!opts->record) return;
    push(t0, count, root);
    next_sample = opts->sample_dt;
  }
  // called before applying an event at time `t`: flush grid points < t
  void before_event(double t, std::uint32_t count, std::uint8_t root) {
    if (!opts->record || opts->sample_dt <= 0.0) return;
    while (next_sample < t) {
      push(next_sample, count, root);
      next_sample += opts->sample_dt;
    }
  }
  void after_event(double t, std::uint32_t count, std::uint8_t root) {
    if (!opts->record || opts->sample_dt > 0.0) return;
    push(t, count, root);
  }
  void finish(double horizon, std::uint32_t count, std::uint8_t root) {
    if (!opts->record || opts->sample_dt <= 0.0) return;
    while (next_sample <= horizon + 1e-12) {
      push(next_sample, count, root);
      next_sample += opts->sample_dt;
    }
  }
  void push(double t, std::uint32_t count, std::uint8_t root) {
    traj.times.push_back(t);
    traj.counts.push_back(count);
    traj.root_state.push_back(root);
  }
};

}  // namespace

VertexSet InitSpec::resolve(const Tree& tree) const {
  switch (kind) {
    case root:
      return VertexSet{tree.root()};
    case all_interior:
      return VertexSet(tree.interior());
    case explicit_set:
      return set;
  }
  return {};
}

ForwardSimulator::ForwardSimulator(const Tree& tree, const ModelParams& params)
    : tree_(&tree), params_(params) {
  params_.require_compatible(tree.min_degree());
  uniform_rates_ = (tree.min_degree() == tree.max_degree());
  total_rate_ = 0.0;
  cum_rate_.clear();
  for (VertexId x : tree.interior()) {
    total_rate_ += params_.site_rate(tree.degree(x));
    cum_rate_.push_back(total_rate_);
  }
  pick_cum_.assign(params_.max_pick() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k <= params_.max_pick(); ++k) {
    acc += params_.p(k);
    pick_cum_[k] = acc;
  }
}

void ForwardSimulator::reset(const VertexSet& init) {
  state_.assign(tree_->size(), 0);
  count_ = 0;
  boundary_touched_ = false;
  for (VertexId v : init) {
    if (v >= tree_->size()) throw std::out_of_range("forward: unknown vertex in init");
    if (tree_->is_boundary(v)) continue;  // frozen at 0
    if (!state_[v]) {
      state_[v] = 1;
      ++count_;
      boundary_touched_ |= tree_->has_boundary_child(v);
    }
  }
}

bool ForwardSimulator::apply(VertexId site, const VertexId* sources, std::size_t k) {
  std::uint8_t next = 0;
  for (std::size_t i = 0; i < k; ++i) next |= state_[sources[i]];
  std::uint8_t prev = state_[site];
  if (next == prev) return false;
  state_[site] = next;
  if (next) {
    ++count_;
    boundary_touched_ |= tree_->has_boundary_child(site);
  } else {
    --count_;
  }
  return true;
}

template <class NextEvent>
ForwardTrajectory ForwardSimulator::drive(NextEvent&& next, double horizon,
                                          const ForwardOptions& opts, const Observer& observer) {
  Recorder rec{&opts, {}, 0.0};
  rec.start(0.0, count_, state_.empty() ? 0 : state_[0]);
  if (count_ == 0) {
    rec.traj.extinction_time = 0.0;
    rec.finish(horizon, 0, 0);
    rec.traj.boundary_touched = boundary_touched_;
    return std::move(rec.traj);
  }

  double t = 0.0;
  VertexId site;
  const VertexId* sources;
  std::size_t k;
  while (next(t, site, sources, k)) {
    rec.before_event(t, count_, state_[0]);
    apply(site, sources, k);
    if (observer) observer(t, state_);
    rec.after_event(t, count_, state_[0]);
    if (count_ == 0) {
      rec.traj.extinction_time = t;
      break;
    }
  }
  rec.finish(horizon, count_, count_ ? state_[0] : 0);
  rec.traj.boundary_touched = boundary_touched_;
  return std::move(rec.traj);
}

ForwardTrajectory ForwardSimulator::run(const VertexSet& init, double horizon,
                                        std::uint64_t seed, const ForwardOptions& opts,
                                        const Observer& observer) {
  if (!(horizon > 0.0)) throw std::invalid_argument("forward: horizon must be > 0");
  reset(init);
  if (tree_->interior_count() == 0 || total_rate_ <= 0.0) {
    auto no_events = [](double&, VertexId&, const VertexId*&, std::size_t&) { return false; };
    return drive(no_events, horizon, opts, observer);
  }

  Rng rng(derive_stream(mix64(seed ^ kForwardSalt), 0));
  const auto& interior = tree_->interior();
  std::vector<VertexId> scratch(tree_->max_degree());
  std::vector<VertexId> src(params_.max_pick());
  double clock = 0.0;

  auto next = [&](double& t, VertexId& site, const VertexId*& sources, std::size_t& k) {
    for (;;) {
      clock += rng.exponential(total_rate_);
      if (clock > horizon) return false;
      std::size_t i;
      if (uniform_rates_) {
        i = rng.below(static_cast<std::uint32_t>(interior.size()));
      } else {
        double u = rng.uniform01() * total_rate_;
        i = std::upper_bound(cum_rate_.begin(), cum_rate_.end(), u) - cum_rate_.begin();
        if (i >= interior.size()) i = interior.size() - 1;
      }
      VertexId x = interior[i];
      const int deg = tree_->degree(x);
      const double lam = params_.site_rate(deg);
      double r = rng.uniform01() * lam;
      t = clock;
      site = x;
      if (r < params_.p0()) {
        k = 0;
        sources = nullptr;
        return true;
      }
      double v = (r - params_.p0()) / deg;  // in [0, 1 - p_0)
      std::size_t kk =
          std::upper_bound(pick_cum_.begin() + 1, pick_cum_.end(), v) - pick_cum_.begin();
      if (kk > params_.max_pick()) kk = params_.max_pick();
      for (int j = 0; j < deg; ++j) scratch[j] = static_cast<VertexId>(j);
      for (std::size_t j = 0; j < kk; ++j) {
        std::uint32_t m = j + rng.below(static_cast<std::uint32_t>(deg - j));
        std::swap(scratch[j], scratch[m]);
        src[j] = tree_->neighbor(x, scratch[j]);
      }
      k = kk;
      sources = src.data();
      return true;
    }
  };
  return drive(next, horizon, opts, observer);
}

ForwardTrajectory ForwardSimulator::run_from_log(const EventLog& log, const VertexSet& init,
                                                 double horizon, const ForwardOptions& opts,
                                                 const Observer& observer) {
  if (&log.tree() != tree_)
    throw std::invalid_argument("forward: log was sampled on a different tree");
  if (horizon > log.horizon())
    throw std::out_of_range("forward: horizon exceeds the log window");
  reset(init);
  std::size_t pos = 0;
  const auto& events = log.global();
  auto next = [&](double& t, VertexId& site, const VertexId*& sources, std::size_t& k) {
    if (pos >= events.size() || events[pos].time > horizon) return false;
    const Event& ev = events[pos++];
    t = ev.time;
    site = ev.site;
    sources = ev.sources.data();
    k = ev.sources.size();
    return true;
  };
  return drive(next, horizon, opts, observer);
}

Estimate survival_probability(const TreeSpec& spec, const ModelParams& params,
                              const InitSpec& init, double horizon, std::uint32_t replicas,
                              std::uint64_t seed) {
  if (replicas < 1) throw std::invalid_argument("survival_probability: replicas must be >= 1");
  ForwardOptions opts;
  opts.record = false;
  opts.sample_dt = 0.0;

  std::uint64_t survived = 0, touched = 0;
  std::optional<Tree> shared;
  std::optional<ForwardSimulator> shared_sim;
  if (!spec.is_random()) {
    shared.emplace(spec.make(0));
    shared_sim.emplace(*shared, params);
  }
  for (std::uint32_t r = 0; r < replicas; ++r) {
    std::optional<Tree> fresh;
    std::optional<ForwardSimulator> fresh_sim;
    if (spec.is_random()) {
      fresh.emplace(spec.make(derive_stream(seed ^ kTreeSalt, r)));
      fresh_sim.emplace(*fresh, params);
    }
    ForwardSimulator& sim = spec.is_random() ? *fresh_sim : *shared_sim;
    ForwardTrajectory traj =
        sim.run(init.resolve(sim.tree()), horizon, derive_stream(seed, r), opts);
    if (!traj.extinction_time.has_value()) ++survived;
    if (traj.boundary_touched) ++touched;
  }
  return Estimate::from_fraction(survived, replicas, seed,
                                 static_cast<double>(touched) / replicas);
}

Estimate root_occupation_frequency(const TreeSpec& spec, const ModelParams& params,
                                   double horizon, std::uint32_t replicas, std::uint64_t seed,
                                   double window_start) {
  if (replicas < 1) throw std::invalid_argument("root_occupation: replicas must be >= 1");
  if (!(window_start >= 0.0 && window_start < 1.0))
    throw std::invalid_argument("root_occupation: window_start must be in [0,1)");
  Tree probe = spec.make(0);
  if (probe.interior_count() == 0)
    throw std::invalid_argument("root_occupation: tree has no interior vertices");
  double root_rate = params.site_rate(probe.degree(probe.root()));
  if (root_rate * horizon < 10.0)
    throw std::invalid_argument(
        "root_occupation: horizon too small, fewer than 10 root events expected");

  const double w0 = window_start * horizon;
  const double window = horizon - w0;
  std::vector<double> values(replicas, 0.0);
  std::uint64_t touched = 0;
  std::optional<ForwardSimulator> shared_sim;
  if (!spec.is_random()) shared_sim.emplace(probe, params);
  for (std::uint32_t r = 0; r < replicas; ++r) {
    std::optional<Tree> fresh_tree;
    std::optional<ForwardSimulator> fresh_sim;
    if (spec.is_random()) {
      fresh_tree.emplace(spec.make(derive_stream(seed ^ kTreeSalt, r)));
      fresh_sim.emplace(*fresh_tree, params);
    }
    ForwardSimulator& sim = spec.is_random() ? *fresh_sim : *shared_sim;
    const Tree& fresh = sim.tree();
    double occupied_time = 0.0;
    double last_t = 0.0;
    std::uint8_t last_root = 1;  // all-occupied start
    auto observer = [&](double t, const std::vector<std::uint8_t>& state) {
      if (state[0] != last_root) {
        if (last_root) occupied_time += std::max(0.0, std::min(t, horizon) - std::max(last_t, w0));
        last_t = t;
        last_root = state[0];
      }
    };
    ForwardOptions opts;
    opts.record = false;
    opts.sample_dt = 0.0;
    ForwardTrajectory traj =
        sim.run(InitSpec::from_all().resolve(fresh), horizon, derive_stream(seed, r), opts,
                observer);
    if (last_root) occupied_time += horizon - std::max(last_t, w0);
    values[r] = occupied_time / window;
    if (traj.boundary_touched) ++touched;
  }
  return Estimate::from_values(values, seed, static_cast<double>(touched) / replicas);
}

}  // namespace zealot
