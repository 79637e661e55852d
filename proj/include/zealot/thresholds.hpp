#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zealot/bigint.hpp"
#include "zealot/params.hpp"
#include "zealot/tree.hpp"

namespace zealot::thresholds {

// probability two walks started at distance 2 on the d-regular tree never
// meet: 1 - (d-1)^-2
double beta(int d);

// probability two rate-1 walks at distance x on the d-regular tree ever meet:
// (d-1)^-x
double pair_hit_prob(int d, int distance);

// gamma = sum_{k>=2}(k-1)p_k - p_0; positive means the zealots survive on any
// tree with degrees in [3, M]
double survival_margin(const ModelParams& params);

// d * beta(d) * sum_{k>=2}(k-1)p_k - p_0; negative means the dual dies out on
// the d-regular tree, and with it the zealot voter model
double extinction_margin(int d, const ModelParams& params);

// local extinction when mu < (d(1-p_0)+p_0) / (2 sqrt(d-1))
double local_dieout_bound(int d, double p0);

// local survival when p_0 = 0 and mu > d / (1 + sqrt(d-1))
double local_survival_bound(int d);

// Galton-Watson local extinction when p_0 = 0 and mu < M / (2 sqrt(M-1))
double gw_local_dieout_bound(int max_degree);

// exact number of closed walks of length 2n at a vertex of the d-regular
// tree, by dynamic programming on the distance chain (d ways out of the
// root, d-1 ways outward elsewhere, one way back)
BigUint loop_count_exact(int d, int n);
double loop_count_root(int d, int n);  // loop_count_exact(d, n)^(1/2n)

// m(theta) = sum_j q_j (j-1) ((j-mu)/mu)^theta; requires 0 < mu < min support
double m_theta(const DegreeDist& dist, double mu, double theta);
double m_prime(const DegreeDist& dist, double mu, double theta);
double m_prime0(const DegreeDist& dist, double mu);

struct NuReport {
  double mu = 0.0;
  double m0 = 0.0;       // m(0)
  double mprime0 = 0.0;  // m'(0)
  std::optional<double> theta_bar;  // closed-form minimizer on {3,4} support
  double nu0 = 0.0;
  double minimizer = 0.0;  // +inf when the infimum is only attained in the limit
  bool local_survival = false;  // nu0 < 1 certifies local survival (p_0 = 0)
};

// nu(0) = inf_{theta >= 0} m(theta). Interior minima are found by
// golden-section on a geometrically grown bracket; on two-atom {3,4} support
// the closed-form minimizer is computed as well and the two routes must agree
// on the minimum to 1e-8.
NuReport nu0(const DegreeDist& dist, double mu);

// q_3 value at which m'(0) changes sign on {3,4} support, for mu in (3/2, 2]
double p_crit(double mu);

// log-increments of the harmonic function along a root path:
// out[n-1] = sum_{k=1}^{n-1} log(mu / (d(x_k) - mu)), normalized so the first
// increment is log 1 = 0
std::vector<double> harmonic_increments(const Tree& tree, double mu,
                                        std::span<const VertexId> path);

struct PerturbationInputs {
  std::map<int, double> pi;                       // degree fraction pi_m, sums to 1
  std::map<std::pair<int, int>, double> mu_mk;    // expected survivors of k walks at degree m
  ModelParams params;
};

// sum_m pi_m sum_k k p_k (mu_mk - 1) - p_0; the small-perturbation
// survival/extinction margin for the dual on Galton-Watson trees
double perturbation_margin(const PerturbationInputs& inputs);

// Monte Carlo for mu_{m,k}: k coalescing rate-1 walks from distinct neighbors
// of a degree-m vertex, run to the horizon. Overestimates the infinite-horizon
// value since later coalescences are missed.
Estimate estimate_mu_mk(const DegreeDist& dist, int m, int k, double horizon,
                        std::uint32_t replicas, std::uint64_t seed);

enum class Regime { survives, dies, dies_locally, survives_locally, undetermined };
std::string regime_name(Regime r);

struct CriterionVerdict {
  std::string name;
  bool applicable = false;
  bool satisfied = false;  // meaningful only when applicable
  Regime label = Regime::undetermined;
  double margin = 0.0;  // signed distance to the criterion's threshold
};

struct ThresholdReport {
  double gamma = 0.0;
  std::optional<double> extinction_margin;
  std::optional<double> local_dieout;
  std::optional<double> local_survival;
  std::optional<std::pair<double, double>> local_interval;  // [d/2sqrt(d-1), d/(1+sqrt(d-1))]
  std::optional<NuReport> nu;
  std::vector<CriterionVerdict> criteria;
};

using GraphSpec = std::variant<int, DegreeDist>;  // regular degree d, or a GW distribution

// Evaluates every applicable criterion separately and never merges them into
// a single verdict where the theory leaves a gap.
ThresholdReport classify(const GraphSpec& graph, const ModelParams& params);

}  // namespace zealot::thresholds
