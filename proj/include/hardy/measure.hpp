#pragma once
// Probability measures dmu = e^{-V} dx / Z on the real line.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hardy/error.hpp"
#include "hardy/potential.hpp"
#include "hardy/quad.hpp"

namespace hardy {

inline constexpr double kUnderflowFloor = 1e-300;
inline constexpr double kSearchLimit = 1e6;

namespace detail {

/// log of the integral of e^{-V(s t)} dt over [x, inf) with s = +-1, i.e. the
/// upper tail (s = 1) or the mirrored lower tail (s = -1) of the raw density.
/// Accumulated over chunks of doubling width until they stop contributing.
inline double log_raw_tail(const Potential& V, double x, double s, const quad::QuadConfig& cfg) {
  auto lf = [&](double t) { return -V(s * t); };
  double total = quad::kNegInf;
  double a = x, w = 1.0;
  for (int k = 0;; ++k) {
    if (a > kSearchLimit + std::abs(x))
      throw NonIntegrableError("e^{-V} is not integrable: tail mass persists beyond x = " +
                               std::to_string(s * a) + " for " + V.spec().label());
    const double chunk = quad::log_integral(lf, a, a + w, cfg, V.split_period());
    total = quad::log_add(total, chunk);
    a += w;
    w *= 2.0;
    if (k >= 2 && (chunk == quad::kNegInf || chunk < total - 45.0)) break;
  }
  return total;
}

inline double log_raw_mass(const Potential& V, double a, double b, const quad::QuadConfig& cfg) {
  if (!(a < b)) return quad::kNegInf;
  return quad::log_integral([&](double t) { return -V(t); }, a, b, cfg, V.split_period());
}

/// One-sided truncation search on the side s = +-1.
inline double truncation_side(const Potential& V, double eps, double s,
                              const quad::QuadConfig& cfg) {
  auto ok = [&](double X) {
    const double head = quad::log_integral([&](double t) { return -V(s * t); }, 0.0, X, cfg,
                                           V.split_period());
    return log_raw_tail(V, X, s, cfg) <= std::log(eps) + head;
  };
  double hi = 1.0;
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > kSearchLimit)
      throw NonIntegrableError("truncation search failed by X = 1e6 for " + V.spec().label());
  }
  double lo = hi / 2.0;
  if (hi == 1.0) lo = 0.0;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// Smallest (grid-refined) X with mass beyond X at most eps times the mass on
/// [0, X], on both sides for non-even potentials.
inline double truncation_point(const Potential& V, double eps, const quad::QuadConfig& cfg = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("truncation_point: eps must lie in (0,1)");
  double X = detail::truncation_side(V, eps, 1.0, cfg);
  if (!V.is_even()) X = std::max(X, detail::truncation_side(V, eps, -1.0, cfg));
  return X;
}

struct TailValue {
  double value;
  bool underflow;  // true when the probability fell below kUnderflowFloor
};

class Measure1D {
 public:
  Measure1D(Potential V, const quad::QuadConfig& cfg, double eps_trunc)
      : V_(std::move(V)), cfg_(cfg), eps_(eps_trunc) {
    cfg_.validate();
    if (!(eps_ > 0.0 && eps_ < 1.0)) throw DomainError("normalize: eps_trunc must lie in (0,1)");
    trunc_ = truncation_point(V_, eps_, cfg_);
    log_upper0_ = detail::log_raw_tail(V_, 0.0, 1.0, cfg_);
    log_lower0_ = V_.is_even() ? log_upper0_ : detail::log_raw_tail(V_, 0.0, -1.0, cfg_);
    log_z_ = quad::log_add(log_upper0_, log_lower0_);
    if (!std::isfinite(log_z_))
      throw NonIntegrableError("normalization constant is not finite for " + V_.spec().label());
    median_ = V_.is_even() ? 0.0 : solve_quantile(0.5);
  }

  const Potential& potential() const { return V_; }
  const quad::QuadConfig& quad_config() const { return cfg_; }
  double log_z() const { return log_z_; }
  double z() const { return std::exp(log_z_); }
  double median() const { return median_; }
  double truncation() const { return trunc_; }
  double eps_trunc() const { return eps_; }
  bool is_even() const { return V_.is_even(); }
  double split_period() const { return V_.split_period(); }
  std::string label() const { return V_.spec().label(); }

  double log_density(double x) const { return -V_(x) - log_z_; }
  double density(double x) const { return std::exp(log_density(x)); }

  /// log mu([x, inf)).
  double log_tail(double x) const {
    if (x >= 0.0) return detail::log_raw_tail(V_, x, 1.0, cfg_) - log_z_;
    return std::log1p(-std::exp(log_lower(x)));
  }
  /// log mu((-inf, x]).
  double log_lower(double x) const {
    if (x <= 0.0) return detail::log_raw_tail(V_, -x, -1.0, cfg_) - log_z_;
    return std::log1p(-std::exp(log_tail(x)));
  }

  TailValue tail_checked(double x) const {
    const double lt = log_tail(x);
    const double v = std::exp(lt);
    if (v < kUnderflowFloor) return {0.0, true};
    return {v, false};
  }
  double tail(double x) const { return tail_checked(x).value; }
  double cdf(double x) const {
    const double v = std::exp(log_lower(x));
    return v < kUnderflowFloor ? 0.0 : v;
  }

  /// Log of the raw (unnormalized) mass of [a, b].
  double log_raw_mass(double a, double b) const { return detail::log_raw_mass(V_, a, b, cfg_); }

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
    if (V_.is_even() && p == 0.5) return 0.0;
    return solve_quantile(p);
  }

  /// N(t) = -log(2 mu([t, inf))) for even measures.
  double n_profile(double t) const {
    if (!V_.is_even()) throw DomainError("n_profile requires an even measure");
    if (!(t >= 0.0)) throw DomainError("n_profile requires t >= 0");
    if (t == 0.0) return 0.0;
    return -(std::log(2.0) + log_tail(t));
  }

 private:
  // Residual that increases with x; evaluated on the side that keeps the
  // small probability accurate.
  double residual(double x, double p) const {
    if (p >= 0.5) return (1.0 - p) - std::exp(log_tail(x)) ;
    return std::exp(log_lower(x)) - p;
  }

  double solve_quantile(double p) const {
    double lo = -trunc_, hi = trunc_;
    double rlo = residual(lo, p), rhi = residual(hi, p);
    while (rlo > 0.0) {
      lo *= 2.0;
      if (-lo > kSearchLimit) throw NumericalError("quantile: bracket search failed");
      rlo = residual(lo, p);
    }
    while (rhi < 0.0) {
      hi *= 2.0;
      if (hi > kSearchLimit) throw NumericalError("quantile: bracket search failed");
      rhi = residual(hi, p);
    }
    // bisection down to a small bracket, then safeguarded secant
    for (int i = 0; i < 200 && hi - lo > 1e-4 * std::max(1.0, std::abs(lo)); ++i) {
      const double mid = 0.5 * (lo + hi);
      const double r = residual(mid, p);
      if (r == 0.0) return mid;
      if (r < 0.0) { lo = mid; rlo = r; } else { hi = mid; rhi = r; }
    }
    const double ptol = 1e-13 * std::min(p, 1.0 - p) + 1e-16;
    int side = 0;
    for (int i = 0; i < 100; ++i) {
      double x = lo - rlo * (hi - lo) / (rhi - rlo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double r = residual(x, p);
      if (std::abs(r) <= ptol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                 std::max(1.0, std::abs(x)))
        return x;
      // Illinois modification keeps the secant from stalling on one end
      if (r < 0.0) {
        lo = x;
        rlo = r;
        if (side == -1) rhi *= 0.5;
        side = -1;
      } else {
        hi = x;
        rhi = r;
        if (side == 1) rlo *= 0.5;
        side = 1;
      }
    }
    return 0.5 * (lo + hi);
  }

  Potential V_;
  quad::QuadConfig cfg_;
  double eps_;
  double trunc_ = 0.0;
  double log_upper0_ = 0.0, log_lower0_ = 0.0;
  double log_z_ = 0.0;
  double median_ = 0.0;
};

inline Measure1D normalize(Potential V, const quad::QuadConfig& cfg = {},
                           double eps_trunc = 1e-12) {
  return Measure1D(std::move(V), cfg, eps_trunc);
}

inline Measure1D normalize(const PotentialSpec& spec, const quad::QuadConfig& cfg = {},
                           double eps_trunc = 1e-12) {
  return Measure1D(make_potential(spec), cfg, eps_trunc);
}

}  // namespace hardy
