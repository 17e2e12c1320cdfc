#pragma once
// Counter-based uniforms and inverse-CDF sampling from a Measure1D.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hardy/measure.hpp"

namespace hardy {

/// SplitMix64 finalizer applied to seed + (i+1) * golden gamma. The i-th
/// draw depends only on (seed, i), so any sub-range can be generated alone.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t i) const {
    std::uint64_t z = seed_ + (i + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
  }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Tabulated inverse CDF on [-T, T]: exact CDF at the nodes, cubic Hermite
/// in between (density values as slopes), exact quantile outside the table.
class Sampler {
 public:
  explicit Sampler(const Measure1D& m, int half_nodes = 1 << 13) : m_(&m) {
    const double T = m.truncation();
    const int n = 2 * half_nodes + 1;
    x_.resize(n);
    f_.resize(n);
    pdf_.resize(n);
    for (int i = 0; i < n; ++i) x_[i] = -T + 2.0 * T * i / (n - 1);
    x_[half_nodes] = 0.0;
    // cell masses, accumulated from the left in relative units
    std::vector<double> cell(n - 1);
    for (int i = 0; i + 1 < n; ++i) cell[i] = m.log_raw_mass(x_[i], x_[i + 1]) - m.log_z();
    const double left = std::exp(m.log_lower(-T));
    f_[0] = left;
    for (int i = 0; i + 1 < n; ++i) f_[i + 1] = f_[i] + std::exp(cell[i]);
    for (int i = 0; i < n; ++i) pdf_[i] = m.density(x_[i]);
  }

  double inverse(double u) const {
    if (u <= f_.front() || u >= f_.back()) return m_->quantile(u);
    const auto it = std::upper_bound(f_.begin(), f_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - f_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double F0 = f_[i], F1 = f_[i + 1];
    const double d0 = pdf_[i] * h, d1 = pdf_[i + 1] * h;
    // Hermite basis on s in [0,1]
    auto H = [&](double s) {
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * F0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * F1 +
             (s3 - s2) * d1;
    };
    auto dH = [&](double s) {
      const double s2 = s * s;
      return (6 * s2 - 6 * s) * F0 + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) * F1 +
             (3 * s2 - 2 * s) * d1;
    };
    double lo = 0.0, hi = 1.0;
    double s = F1 > F0 ? (u - F0) / (F1 - F0) : 0.5;
    for (int k = 0; k < 50; ++k) {
      const double r = H(s) - u;
      if (r < 0.0) lo = s; else hi = s;
      const double d = dH(s);
      double sn = d > 0.0 ? s - r / d : 0.5 * (lo + hi);
      if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
      if (std::abs(sn - s) < 1e-15) {
        s = sn;
        break;
      }
      s = sn;
    }
    return x_[i] + s * h;
  }

  /// count draws using uniforms with counters [offset, offset + count).
  std::vector<double> draw(const CounterRng& rng, std::size_t count, std::uint64_t offset = 0) const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = inverse(rng.uniform(offset + i));
    return out;
  }

 private:
  const Measure1D* m_;
  std::vector<double> x_, f_, pdf_;
};

/// count i.i.d. draws from m, deterministic in (seed, count).
inline std::vector<double> sample(const Measure1D& m, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw DomainError("sample: count must be >= 1");
  Sampler s(m);
  return s.draw(CounterRng(seed), count);
}

}  // namespace hardy
