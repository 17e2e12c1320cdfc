#pragma once
// Finite-difference discretization of the Neumann generator of mu on [-X, X]
// and its spectral gap.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/functionals.hpp"
#include "hardy/measure.hpp"
#include "hardy/quad.hpp"

namespace hardy::spectral {

/// Nodes x_0 < ... < x_N with step h, node weights w_i = e^{-V(x_i)} and edge
/// conductances c_{i+1/2} = e^{-V(mid)} / h^2, stored as logs so that deep
/// tails do not underflow. Quadratic form sum c (u_{i+1} - u_i)^2 h, inner
/// product sum w u v h.
struct TridiagonalOperator {
  std::vector<double> x;
  std::vector<double> log_w;  // size N + 1
  std::vector<double> log_c;  // size N
  double h = 0.0;

  std::size_t nodes() const { return x.size(); }
  std::vector<double> weights() const { return exps(log_w); }
  std::vector<double> conductances() const { return exps(log_c); }

  /// (A u)_i = (1/w_i) sum over neighbours j of c_{ij} (u_i - u_j).
  std::vector<double> apply(const std::vector<double>& u) const {
    const std::size_t n = nodes();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double du = u[k] - u[k + 1];
      out[k] += std::exp(log_c[k] - log_w[k]) * du;
      out[k + 1] -= std::exp(log_c[k] - log_w[k + 1]) * du;
    }
    return out;
  }
  double inner(const std::vector<double>& u, const std::vector<double>& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes(); ++i) s += std::exp(log_w[i]) * u[i] * v[i] * h;
    return s;
  }
  double form(const std::vector<double>& u) const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < nodes(); ++k) {
      const double du = u[k + 1] - u[k];
      s += std::exp(log_c[k]) * du * du * h;
    }
    return s;
  }

 private:
  static std::vector<double> exps(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double t) { return std::exp(t); });
    return out;
  }
};

/// Uniform grid on [-X, X] with N intervals.
inline TridiagonalOperator discretize(const Measure1D& m, double X, std::size_t N) {
  if (N < 100) throw DomainError("discretize: N must be >= 100");
  if (!(X > 0.0)) throw DomainError("discretize: X must be positive");
  const auto& V = m.potential();
  TridiagonalOperator op;
  op.h = 2.0 * X / static_cast<double>(N);
  op.x.resize(N + 1);
  op.log_w.resize(N + 1);
  op.log_c.resize(N);
  for (std::size_t i = 0; i <= N; ++i) {
    op.x[i] = -X + op.h * static_cast<double>(i);
    op.log_w[i] = -V(op.x[i]);
  }
  op.x[N] = X;
  const double lh2 = 2.0 * std::log(op.h);
  for (std::size_t k = 0; k < N; ++k) op.log_c[k] = -V(0.5 * (op.x[k] + op.x[k + 1])) - lh2;
  return op;
}

namespace detail {

/// Number of eigenvalues below sigma of the symmetric tridiagonal matrix
/// (diag a, offdiag b), by the usual pivot recurrence.
inline std::size_t sturm_count(const std::vector<double>& a, const std::vector<double>& b2,
                               double sigma) {
  std::size_t neg = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = a[i] - sigma - (i > 0 ? b2[i - 1] / d : 0.0);
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++neg;
  }
  return neg;
}

/// Same count for a matrix given as L D L^T (pivots d, products d_i l_i^2),
/// by the stationary qd transform; relative accuracy for tiny eigenvalues.
inline std::size_t ldl_count(const std::vector<double>& d, const std::vector<double>& dl2,
                             double sigma) {
  std::size_t neg = 0;
  double s = -sigma;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double dp = std::isfinite(s) ? d[i] + s : s;
    if (dp == 0.0) dp = -std::numeric_limits<double>::min();
    if (dp < 0.0) ++neg;
    if (i + 1 < d.size()) s = std::isfinite(dp) ? dl2[i] * (s / dp) - sigma : dl2[i] - sigma;
  }
  return neg;
}

}  // namespace detail

struct GapResult {
  double lambda1 = 0.0;
  double ground = 0.0;        // smallest eigenvalue of the symmetrized matrix
  double matrix_norm = 0.0;   // Gershgorin bound used to judge the ground value
  double tail_mass = 0.0;     // mu(|x| > X)
};

/// Second eigenvalue of the generator. The constant mode is split off
/// exactly: the nonzero spectrum of D^{-1} B^T C B equals the spectrum of the
/// edge matrix C^{1/2} B D^{-1} B^T C^{1/2}, whose L D L^T pivots are
/// d_k = c_k (1/w_{k+1} + 1/W_k) with W_k the cumulative node mass, a sum of
/// positive terms. Bisection on the qd count to 1e-10 relative.
inline GapResult spectral_gap_report(const TridiagonalOperator& op) {
  const std::size_t n = op.nodes();
  const std::size_t N = n - 1;
  const auto& lw = op.log_w;
  const auto& lc = op.log_c;

  // ground state of the symmetrized primal matrix D^{-1/2} B^T C B D^{-1/2}
  std::vector<double> a(n, 0.0), b2(N);
  double norm = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    a[k] += std::exp(lc[k] - lw[k]);
    a[k + 1] += std::exp(lc[k] - lw[k + 1]);
    b2[k] = std::exp(2.0 * lc[k] - lw[k] - lw[k + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = a[i];
    if (i > 0) row += std::sqrt(b2[i - 1]);
    if (i < N) row += std::sqrt(b2[i]);
    norm = std::max(norm, row);
  }
  GapResult out;
  out.matrix_norm = norm;
  {
    double lo = -norm, hi = norm;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * norm; ++it) {
      const double mid = 0.5 * (lo + hi);
      (detail::sturm_count(a, b2, mid) >= 1 ? hi : lo) = mid;
    }
    out.ground = 0.5 * (lo + hi);
  }
  if (!(std::abs(out.ground) <= 1e-8 * std::max(1.0, norm)))
    throw NumericalError("spectral_gap: ground eigenvalue " + std::to_string(out.ground) +
                         " is not zero relative to the operator norm " + std::to_string(norm));

  // edge matrix pivots
  std::vector<double> d(N), dl2(N);
  double lW = lw[0];
  for (std::size_t k = 0; k < N; ++k) {
    const double ld = lc[k] + quad::log_add(-lw[k + 1], -lW);
    d[k] = std::exp(ld);
    if (k + 1 < N) {
      // b_k^2 / d_k with b_k^2 = c_k c_{k+1} / w_{k+1}^2
      dl2[k] = std::exp(lc[k] + lc[k + 1] - 2.0 * lw[k + 1] - ld);
    }
    lW = quad::log_add(lW, lw[k + 1]);
  }
  double hi = 0.0;
  for (std::size_t k = 0; k < N; ++k) hi = std::max(hi, d[k] + dl2[k] + (k > 0 ? dl2[k - 1] : 0.0));
  hi *= 2.0;
  while (detail::ldl_count(d, dl2, hi) < 1) hi *= 2.0;
  double lo = hi;
  while (detail::ldl_count(d, dl2, lo) >= 1) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min())
      throw NumericalError("spectral_gap: first nonzero eigenvalue below the double range");
  }
  hi = 2.0 * lo;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (detail::ldl_count(d, dl2, mid) >= 1 ? hi : lo) = mid;
  }
  out.lambda1 = 0.5 * (lo + hi);
  return out;
}

inline double spectral_gap(const TridiagonalOperator& op) { return spectral_gap_report(op).lambda1; }

inline GapResult spectral_gap_report(const Measure1D& m, double X, std::size_t N) {
  auto out = spectral_gap_report(discretize(m, X, N));
  out.tail_mass = m.tail(X) + m.cdf(-X);
  return out;
}

/// Var(f) / int f'^2, a lower bound on C_P.
inline double rayleigh(const Measure1D& m, const functionals::TestFunction& f) {
  const double e = functionals::energy(m, f, functionals::EnergyKind::Dirichlet);
  if (e < 1e-14) throw DomainError("rayleigh: Dirichlet energy below 1e-14");
  return functionals::variance(m, f) / e;
}

}  // namespace hardy::spectral
