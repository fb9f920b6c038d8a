#ifndef TUNNEL_NUMERICS_HPP
#define TUNNEL_NUMERICS_HPP

// Small numerical kernels shared by the physics headers: removable-singularity
// helpers for sinh/tanh quotients, composite Gauss-Legendre rules, 1-D
// maximization, Richardson-extrapolated derivatives and phase unwrapping.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tunnel {

/// Thrown when an argument violates a documented precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when an iterative or refined computation cannot meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail

// The barrier functions are analytic in rho^2 = w^2 - k^2, so everything below
// takes the signed square (rho2) and switches to the trigonometric
// continuation for rho2 < 0. Series are used where |rho L| < 1e-4.

inline constexpr double kSeriesCutoff = 1e-4;

/// cosh(rho x), continued as cos(q x) for rho2 < 0.
inline double cosh_c(double rho2, double x) {
  if (rho2 >= 0.0) return std::cosh(std::sqrt(rho2) * x);
  return std::cos(std::sqrt(-rho2) * x);
}

/// sinh(rho x) / rho, continued as sin(q x) / q; equals x at rho = 0.
inline double sinhc(double rho2, double x) {
  const double z2 = rho2 * x * x;
  if (std::abs(z2) < kSeriesCutoff * kSeriesCutoff)
    return x * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0));
  if (rho2 > 0.0) {
    const double r = std::sqrt(rho2);
    return std::sinh(r * x) / r;
  }
  const double q = std::sqrt(-rho2);
  return std::sin(q * x) / q;
}

/// tanh(rho x) / rho for rho2 >= 0; equals x at rho = 0. No overflow for large rho x.
inline double tanhc(double rho2, double x) {
  detail::require(rho2 >= 0.0, "tanhc: rho2 must be non-negative");
  const double z2 = rho2 * x * x;
  if (z2 < kSeriesCutoff * kSeriesCutoff)
    return x * (1.0 - z2 / 3.0 * (1.0 - 0.4 * z2));
  const double r = std::sqrt(rho2);
  return std::tanh(r * x) / r;
}

/// sinh(x) / x, exact at 0.
inline double shc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) / x;
}

/// (sinh(x) / x - 1) / x^2 without cancellation near 0; tends to 1/6.
inline double shc_m1_over_x2(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 0.5) {
    // sum_{j>=1} x^{2j-2} / (2j+1)!
    double term = 1.0 / 6.0;
    double sum = term;
    for (int j = 2; j < 12; ++j) {
      term *= x2 / ((2.0 * j) * (2.0 * j + 1.0));
      sum += term;
    }
    return sum;
  }
  return (std::sinh(x) / x - 1.0) / x2;
}

/// 1 / sinh^2(x) for x > 0 that underflows gracefully instead of overflowing.
inline double inv_sinh_sq(double x) {
  if (x > 20.0) {
    const double e = std::exp(-2.0 * x);
    return 4.0 * e / ((1.0 - e) * (1.0 - e));
  }
  const double s = std::sinh(x);
  return 1.0 / (s * s);
}

/// One panelled Gauss-Legendre rule on [lo, hi].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite Gauss-Legendre rule: `panels` equal panels of 16 nodes each,
/// with extra panel boundaries forced at each value in `breaks`.
inline QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels,
                                               std::span<const double> breaks = {}) {
  detail::require(hi > lo, "composite_gauss_legendre: empty interval");
  detail::require(panels > 0, "composite_gauss_legendre: need at least one panel");
  using Gauss = boost::math::quadrature::gauss<double, 16>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weight = Gauss::weights();

  std::vector<double> edges;
  edges.reserve(panels + breaks.size() + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels));
  for (double b : breaks)
    if (b > lo && b < hi) edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  QuadratureRule rule;
  rule.nodes.reserve(16 * (edges.size() - 1));
  rule.weights.reserve(16 * (edges.size() - 1));
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    if (b - a <= 0.0) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t j = 0; j < abscissa.size(); ++j) {
      rule.nodes.push_back(mid - half * abscissa[j]);
      rule.weights.push_back(half * weight[j]);
      if (abscissa[j] != 0.0) {
        rule.nodes.push_back(mid + half * abscissa[j]);
        rule.weights.push_back(half * weight[j]);
      }
    }
  }
  return rule;
}

/// Golden-section maximization of a unimodal f on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
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

/// Central-difference derivative refined by Richardson extrapolation over
/// successive step halvings. Returns {derivative, error estimate}.
inline std::pair<double, double> richardson_derivative(const std::function<double(double)>& f,
                                                       double x, double h0, int levels = 6) {
  std::vector<std::vector<double>> table(levels);
  double best = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    table[i].resize(i + 1);
    table[i][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    double factor = 4.0;
    for (int j = 1; j <= i; ++j, factor *= 4.0) {
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
    }
    if (i > 0) {
      const double err = std::abs(table[i][i] - table[i - 1][i - 1]);
      if (err < best_err) {
        best_err = err;
        best = table[i][i];
      }
    }
  }
  return {best, best_err};
}

/// Removes 2*pi jumps from a sampled phase sequence in place.
inline void unwrap_phase(std::span<double> phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double offset = 0.0;
  for (std::size_t i = 1; i < phase.size(); ++i) {
    const double raw = phase[i] + offset;
    const double jump = raw - phase[i - 1];
    offset -= two_pi * std::round(jump / two_pi);
    phase[i] += offset;
  }
}

/// n equally spaced values from lo to hi inclusive; symmetric grids stay
/// exactly symmetric (x[i] == -x[n-1-i] when lo == -hi).
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  detail::require(n >= 2, "linspace: need at least two points");
  std::vector<double> out(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (2.0 * static_cast<double>(i) - denom) / denom;
    out[i] = mid + half * s;
  }
  return out;
}

/// n logarithmically spaced values from lo to hi inclusive (lo, hi > 0).
inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  detail::require(lo > 0.0 && hi > lo, "logspace: need 0 < lo < hi");
  auto exps = linspace(std::log10(lo), std::log10(hi), n);
  for (double& e : exps) e = std::pow(10.0, e);
  exps.front() = lo;
  exps.back() = hi;
  return exps;
}

}  // namespace tunnel

#endif  // TUNNEL_NUMERICS_HPP
