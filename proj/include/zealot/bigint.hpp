#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace zealot {

// Unsigned big integer, base 2^64. Just enough arithmetic for exact walk
// counting: addition, multiplication by a machine word, comparison, decimal
// output and conversion to double/log.
class BigUint {
 public:
  BigUint(std::uint64_t v = 0) {
    if (v) limbs_.push_back(v);
  }

  bool is_zero() const { return limbs_.empty(); }

  BigUint& operator+=(const BigUint& o) {
    if (o.limbs_.size() > limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      carry += limbs_[i];
      if (i < o.limbs_.size()) carry += o.limbs_[i];
      limbs_[i] = static_cast<std::uint64_t>(carry);
      carry >>= 64;
    }
    if (carry) limbs_.push_back(static_cast<std::uint64_t>(carry));
    return *this;
  }

  BigUint& mul_small(std::uint64_t m) {
    if (m == 0) {
      limbs_.clear();
      return *this;
    }
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      carry += static_cast<unsigned __int128>(limbs_[i]) * m;
      limbs_[i] = static_cast<std::uint64_t>(carry);
      carry >>= 64;
    }
    while (carry) {
      limbs_.push_back(static_cast<std::uint64_t>(carry));
      carry >>= 64;
    }
    return *this;
  }

  friend BigUint operator*(BigUint a, std::uint64_t m) { return a.mul_small(m); }
  friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
  friend bool operator==(const BigUint&, const BigUint&) = default;

  double to_double() const {
    double out = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;)
      out = out * 0x1.0p64 + static_cast<double>(limbs_[i]);
    return out;
  }

  // natural log; valid even when the value overflows double range
  double log_value() const {
    if (limbs_.empty()) return -std::numeric_limits<double>::infinity();
    double top = 0.0;
    std::size_t n = limbs_.size();
    std::size_t take = std::min<std::size_t>(n, 2);
    for (std::size_t i = 0; i < take; ++i)
      top = top * 0x1.0p64 + static_cast<double>(limbs_[n - 1 - i]);
    return std::log(top) + static_cast<double>(n - take) * std::log(0x1.0p64);
  }

  std::string to_string() const {
    if (limbs_.empty()) return "0";
    std::vector<std::uint64_t> work(limbs_.rbegin(), limbs_.rend());  // big-endian scratch
    std::string out;
    while (!work.empty()) {
      unsigned __int128 rem = 0;
      for (auto& limb : work) {
        unsigned __int128 cur = (rem << 64) | limb;
        limb = static_cast<std::uint64_t>(cur / 10);
        rem = cur % 10;
      }
      out.push_back(static_cast<char>('0' + static_cast<int>(rem)));
      while (!work.empty() && work.front() == 0) work.erase(work.begin());
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<std::uint64_t> limbs_;  // little-endian, no trailing zeros
};

}  // namespace zealot
