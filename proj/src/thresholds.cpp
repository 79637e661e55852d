#include "zealot/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "zealot/lazy_walk.hpp"
#include "zealot/rng.hpp"

namespace zealot::thresholds {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_degree(int d) {
  if (d < 3) throw std::invalid_argument("thresholds: degree must be >= 3");
}

void require_valid_mu(const DegreeDist& dist, double mu) {
  if (!(mu > 0.0) || mu >= dist.min_degree())
    throw std::domain_error("thresholds: mu must lie in (0, min support degree)");
}

// golden-section minimum of a convex function on [a, b]
double golden_min(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while ((b - a) > rel_tol * std::max(1.0, std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double beta(int d) {
  require_degree(d);
  const double dm1 = static_cast<double>(d - 1);
  return 1.0 - 1.0 / (dm1 * dm1);
}

double pair_hit_prob(int d, int distance) {
  require_degree(d);
  if (distance < 0) throw std::invalid_argument("pair_hit_prob: distance must be >= 0");
  return std::pow(static_cast<double>(d - 1), -static_cast<double>(distance));
}

double survival_margin(const ModelParams& params) { return params.gamma(); }

double extinction_margin(int d, const ModelParams& params) {
  require_degree(d);
  double branch = 0.0;
  for (std::size_t k = 2; k <= params.max_pick(); ++k)
    branch += static_cast<double>(k - 1) * params.p(k);
  return d * beta(d) * branch - params.p0();
}

double local_dieout_bound(int d, double p0) {
  require_degree(d);
  if (p0 < 0.0 || p0 > 1.0) throw std::invalid_argument("local_dieout_bound: p0 in [0,1]");
  return (d * (1.0 - p0) + p0) / (2.0 * std::sqrt(static_cast<double>(d - 1)));
}

double local_survival_bound(int d) {
  require_degree(d);
  return d / (1.0 + std::sqrt(static_cast<double>(d - 1)));
}

double gw_local_dieout_bound(int max_degree) { return local_dieout_bound(max_degree, 0.0); }

BigUint loop_count_exact(int d, int n) {
  require_degree(d);
  if (n < 1) throw std::invalid_argument("loop_count_exact: n must be >= 1");
  const int len = 2 * n;
  std::vector<BigUint> cur(len + 2), next(len + 2);
  cur[0] = BigUint(1);
  for (int step = 0; step < len; ++step) {
    for (auto& b : next) b = BigUint(0);
    for (int x = 0; x <= len; ++x) {
      if (cur[x].is_zero()) continue;
      if (x == 0) {
        next[1] += cur[0] * static_cast<std::uint64_t>(d);
      } else {
        next[x + 1] += cur[x] * static_cast<std::uint64_t>(d - 1);
        next[x - 1] += cur[x];
      }
    }
    std::swap(cur, next);
  }
  return cur[0];
}

double loop_count_root(int d, int n) {
  return std::exp(loop_count_exact(d, n).log_value() / (2.0 * n));
}

double m_theta(const DegreeDist& dist, double mu, double theta) {
  require_valid_mu(dist, mu);
  if (theta < 0.0) throw std::invalid_argument("m_theta: theta must be >= 0");
  double sum = 0.0;
  for (auto [j, q] : dist.atoms())
    sum += q * (j - 1) * std::pow((j - mu) / mu, theta);
  return sum;
}

double m_prime(const DegreeDist& dist, double mu, double theta) {
  require_valid_mu(dist, mu);
  double sum = 0.0;
  for (auto [j, q] : dist.atoms()) {
    const double base = (j - mu) / mu;
    sum += q * (j - 1) * std::pow(base, theta) * std::log(base);
  }
  return sum;
}

double m_prime0(const DegreeDist& dist, double mu) { return m_prime(dist, mu, 0.0); }

NuReport nu0(const DegreeDist& dist, double mu) {
  require_valid_mu(dist, mu);
  NuReport rep;
  rep.mu = mu;
  rep.m0 = m_theta(dist, mu, 0.0);
  rep.mprime0 = m_prime0(dist, mu);

  if (rep.mprime0 >= 0.0) {
    rep.minimizer = 0.0;
    rep.nu0 = rep.m0;
  } else {
    // grow the bracket until the slope turns positive; if it never does, all
    // bases are <= 1 and the infimum is the limit of the base-1 terms
    double hi = 1.0;
    bool bracketed = false;
    for (int i = 0; i < 64; ++i) {
      if (m_prime(dist, mu, hi) > 0.0) {
        bracketed = true;
        break;
      }
      hi *= 2.0;
    }
    if (!bracketed) {
      double limit = 0.0;
      for (auto [j, q] : dist.atoms())
        if (std::abs((j - mu) / mu - 1.0) < 1e-15) limit += q * (j - 1);
      rep.minimizer = kInf;
      rep.nu0 = limit;
    } else {
      auto f = [&](double th) { return m_theta(dist, mu, th); };
      rep.minimizer = golden_min(f, 0.0, hi, 1e-10);
      rep.nu0 = m_theta(dist, mu, rep.minimizer);
    }
  }

  // closed-form minimizer on {3,4} support; the two routes must agree
  const auto& atoms = dist.atoms();
  if (atoms.size() == 2 && atoms[0].first == 3 && atoms[1].first == 4 && mu > 1.5 &&
      mu < 2.0 && rep.mprime0 < 0.0 && std::isfinite(rep.minimizer)) {
    const double q3 = atoms[0].second, q4 = atoms[1].second;
    const double a = 2.0 * q3 * std::log(mu / (3.0 - mu));
    const double b = 3.0 * q4 * std::log((4.0 - mu) / mu);
    const double tb = (std::log(a) - std::log(b)) / std::log((4.0 - mu) / (3.0 - mu));
    rep.theta_bar = tb;
    const double via_closed_form = m_theta(dist, mu, tb);
    if (std::abs(via_closed_form - rep.nu0) > 1e-8)
      throw std::logic_error("nu0: golden-section and closed-form minima disagree");
    rep.nu0 = std::min(rep.nu0, via_closed_form);
  }
  rep.local_survival = rep.nu0 < 1.0;
  return rep;
}

double p_crit(double mu) {
  if (!(mu > 1.5) || !(mu <= 2.0))
    throw std::invalid_argument("p_crit: mu must lie in (3/2, 2]");
  const double a = 3.0 * std::log((4.0 - mu) / mu);
  const double b = 2.0 * std::log(mu / (3.0 - mu));
  return a / (a + b);
}

std::vector<double> harmonic_increments(const Tree& tree, double mu,
                                        std::span<const VertexId> path) {
  if (path.size() < 2)
    throw std::invalid_argument("harmonic_increments: path needs at least two vertices");
  if (path[0] != tree.root())
    throw std::invalid_argument("harmonic_increments: path must start at the root");
  for (std::size_t i = 1; i < path.size(); ++i) {
    const VertexId a = path[i - 1], b = path[i];
    if (tree.parent(b) != a && tree.parent(a) != b)
      throw std::invalid_argument("harmonic_increments: consecutive vertices must be adjacent");
  }
  std::vector<double> out(path.size() - 1, 0.0);
  double acc = 0.0;
  for (std::size_t n = 1; n < path.size(); ++n) {
    out[n - 1] = acc;  // log[phi(x_n) - phi(x_{n-1})], first increment normalized to 1
    if (n + 1 < path.size()) {
      const int deg = tree.degree(path[n]);
      if (mu >= deg) throw std::domain_error("harmonic_increments: mu >= degree on the path");
      acc += std::log(mu / (deg - mu));
    }
  }
  return out;
}

double perturbation_margin(const PerturbationInputs& inputs) {
  double pi_sum = 0.0;
  for (auto [m, frac] : inputs.pi) {
    if (frac < 0.0) throw std::invalid_argument("perturbation_margin: negative pi_m");
    pi_sum += frac;
  }
  if (std::abs(pi_sum - 1.0) > 1e-9)
    throw std::invalid_argument("perturbation_margin: pi must sum to 1");

  double total = 0.0;
  for (auto [m, frac] : inputs.pi) {
    double inner = 0.0;
    for (std::size_t k = 1; k <= inputs.params.max_pick(); ++k) {
      if (inputs.params.p(k) == 0.0) continue;
      double survivors = 1.0;  // k = 1 has nothing to coalesce
      if (k >= 2) {
        auto it = inputs.mu_mk.find({m, static_cast<int>(k)});
        if (it == inputs.mu_mk.end())
          throw std::invalid_argument("perturbation_margin: missing mu_{m,k} entry");
        survivors = it->second;
        if (survivors < 1.0 || survivors > static_cast<double>(k))
          throw std::invalid_argument("perturbation_margin: mu_{m,k} must lie in [1, k]");
      }
      inner += static_cast<double>(k) * inputs.params.p(k) * (survivors - 1.0);
    }
    total += frac * inner;
  }
  return total - inputs.params.p0();
}

Estimate estimate_mu_mk(const DegreeDist& dist, int m, int k, double horizon,
                        std::uint32_t replicas, std::uint64_t seed) {
  if (k > m) throw std::invalid_argument("estimate_mu_mk: need k <= m");
  if (k < 1) throw std::invalid_argument("estimate_mu_mk: need k >= 1");
  if (replicas < 1) throw std::invalid_argument("estimate_mu_mk: replicas must be >= 1");
  if (k == 1) {
    Estimate e;
    e.point = 1.0;
    e.half_width = 0.0;
    e.replicas = replicas;
    e.seed = seed;
    return e;
  }
  std::vector<double> values(replicas, 0.0);
  for (std::uint32_t r = 0; r < replicas; ++r) {
    Rng rng(derive_stream(mix64(seed ^ 0x6d6d6bull), r));
    values[r] = coalescing_survivors(dist, m, k, horizon, rng);
  }
  return Estimate::from_values(values, seed);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::survives: return "survives";
    case Regime::dies: return "dies";
    case Regime::dies_locally: return "dies-locally";
    case Regime::survives_locally: return "survives-locally";
    case Regime::undetermined: return "undetermined";
  }
  return "undetermined";
}

ThresholdReport classify(const GraphSpec& graph, const ModelParams& params) {
  ThresholdReport rep;
  rep.gamma = survival_margin(params);
  const double mu = params.mu();
  const bool no_death = params.p0() == 0.0;

  auto add = [&](std::string name, bool applicable, bool satisfied, Regime when_true,
                 double margin) {
    CriterionVerdict v;
    v.name = std::move(name);
    v.applicable = applicable;
    v.satisfied = applicable && satisfied;
    v.label = v.satisfied ? when_true : Regime::undetermined;
    v.margin = margin;
    rep.criteria.push_back(std::move(v));
  };

  add("frontier-growth-survival", true, rep.gamma > 0.0, Regime::survives, rep.gamma);

  if (const int* d = std::get_if<int>(&graph)) {
    require_degree(*d);
    params.require_compatible(*d);
    rep.extinction_margin = extinction_margin(*d, params);
    rep.local_dieout = local_dieout_bound(*d, params.p0());
    rep.local_survival = local_survival_bound(*d);
    if (no_death)
      rep.local_interval = {*d / (2.0 * std::sqrt(static_cast<double>(*d - 1))),
                            local_survival_bound(*d)};

    add("dual-mean-extinction", true, *rep.extinction_margin < 0.0, Regime::dies,
        *rep.extinction_margin);
    add("local-dieout", true, mu < *rep.local_dieout, Regime::dies_locally,
        *rep.local_dieout - mu);
    add("tagged-walk-local-survival", no_death, mu > *d / 2.0, Regime::survives_locally,
        mu - *d / 2.0);
    add("local-survival", no_death, mu > *rep.local_survival, Regime::survives_locally,
        mu - *rep.local_survival);
  } else {
    const DegreeDist& dist = std::get<DegreeDist>(graph);
    params.require_compatible(dist.min_degree());
    const int max_deg = dist.max_degree();
    rep.local_dieout = gw_local_dieout_bound(max_deg);
    add("gw-local-dieout", no_death, mu < *rep.local_dieout, Regime::dies_locally,
        *rep.local_dieout - mu);
    bool nu_ok = no_death && mu > 0.0 && mu < dist.min_degree();
    if (nu_ok) {
      rep.nu = nu0(dist, mu);
      add("gw-harmonic-local-survival", true, rep.nu->local_survival,
          Regime::survives_locally, 1.0 - rep.nu->nu0);
    } else {
      add("gw-harmonic-local-survival", false, false, Regime::survives_locally, 0.0);
    }
  }
  return rep;
}

}  // namespace zealot::thresholds
