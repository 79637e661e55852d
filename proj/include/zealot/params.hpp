#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace zealot {

// Pick distribution p_0..p_{d_min}: at rate d(x)p_k a voter consults k
// neighbors, at rate p_0 a zealot reverts on its own. In the dual, p_k is the
// k-offspring branching weight and p_0 the death rate.
class ModelParams {
 public:
  explicit ModelParams(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw std::invalid_argument("ModelParams: need at least p_0");
    double sum = 0.0;
    for (double v : p_) {
      if (v < 0.0) throw std::invalid_argument("ModelParams: negative weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("ModelParams: weights must sum to 1");
    for (std::size_t k = 0; k < p_.size(); ++k) {
      mu_ += static_cast<double>(k) * p_[k];
      if (k >= 2) gamma_ += static_cast<double>(k - 1) * p_[k];
    }
    gamma_ -= p_[0];
  }

  double p(std::size_t k) const { return k < p_.size() ? p_[k] : 0.0; }
  const std::vector<double>& weights() const { return p_; }
  std::size_t max_pick() const { return p_.size() - 1; }  // the d_min the params assume
  double p0() const { return p_[0]; }
  double mu() const { return mu_; }        // mean offspring count of the dual
  double gamma() const { return gamma_; }  // sum_{k>=2}(k-1)p_k - p_0

  // per-site event rate in the graphical representation
  double site_rate(int degree) const { return p_[0] + degree * (1.0 - p_[0]); }

  // largest k with p_k > 0 (0 if the mass is all on p_0)
  std::size_t max_positive_pick() const {
    std::size_t m = 0;
    for (std::size_t k = 0; k < p_.size(); ++k)
      if (p_[k] > 0.0) m = k;
    return m;
  }

  void require_compatible(int tree_min_degree) const {
    if (max_positive_pick() > static_cast<std::size_t>(tree_min_degree))
      throw std::invalid_argument(
          "ModelParams: p_k > 0 for k beyond the tree's minimum degree " +
          std::to_string(tree_min_degree));
  }

 private:
  std::vector<double> p_;
  double mu_ = 0.0;
  double gamma_ = 0.0;
};

// Monte Carlo point estimate with a normal-approximation 95% interval.
struct Estimate {
  double point = 0.0;
  double half_width = 0.0;
  std::uint32_t replicas = 0;
  std::uint64_t seed = 0;
  double boundary_fraction = 0.0;  // replicas whose run touched the truncation boundary
  bool degenerate = false;         // too few replicas for an interval

  static Estimate from_fraction(std::uint64_t hits, std::uint32_t n, std::uint64_t seed,
                                double boundary_fraction = 0.0) {
    Estimate e;
    e.replicas = n;
    e.seed = seed;
    e.boundary_fraction = boundary_fraction;
    e.point = n > 0 ? static_cast<double>(hits) / n : 0.0;
    if (n >= 2) {
      e.half_width = 1.96 * std::sqrt(e.point * (1.0 - e.point) / n);
    } else {
      e.degenerate = true;
      e.half_width = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
  }

  // mean of per-replica values, interval from the sample standard deviation
  static Estimate from_values(const std::vector<double>& values, std::uint64_t seed,
                              double boundary_fraction = 0.0) {
    Estimate e;
    e.replicas = static_cast<std::uint32_t>(values.size());
    e.seed = seed;
    e.boundary_fraction = boundary_fraction;
    double sum = 0.0;
    for (double v : values) sum += v;
    e.point = values.empty() ? 0.0 : sum / values.size();
    if (values.size() >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - e.point) * (v - e.point);
      double sd = std::sqrt(ss / (values.size() - 1));
      e.half_width = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
    } else {
      e.degenerate = true;
      e.half_width = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
  }
};

}  // namespace zealot
