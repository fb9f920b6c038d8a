#ifndef TUNNEL_SPECTRUM_HPP
#define TUNNEL_SPECTRUM_HPP

// The transmission-modulated momentum distribution g(k - k0) |T(k, L)|: its
// maximum, the onset of boundary domination at k = w, and the effect of
// cutting the spectrum off below w.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "tunnel/barrier.hpp"
#include "tunnel/field.hpp"
#include "tunnel/numerics.hpp"

namespace tunnel {

/// Gaussian momentum distribution
/// g(k - k0) = (a^2 / 2 pi)^{1/4} exp[-a^2 (k - k0)^2 / 4],
/// optionally truncated to [0, (1 - delta) w].
struct GaussianSpectrum {
  double k0 = 1.0;
  double a = 1.0;
  std::optional<double> cutoff_delta;

  void validate() const {
    detail::require(k0 > 0.0 && std::isfinite(k0), "GaussianSpectrum: k0 must be positive");
    detail::require(a > 0.0 && std::isfinite(a), "GaussianSpectrum: width a must be positive");
    if (cutoff_delta)
      detail::require(*cutoff_delta >= 0.0 && *cutoff_delta < 1.0,
                      "GaussianSpectrum: cutoff fraction must lie in [0, 1)");
  }

  double amplitude(double k) const {
    const double d = k - k0;
    return std::pow(a * a / (2.0 * std::numbers::pi), 0.25) * std::exp(-a * a * d * d / 4.0);
  }

  /// g'(k - k0) / g(k - k0).
  double log_derivative(double k) const { return -a * a * (k - k0) / 2.0; }

  /// Probability mass of g^2 outside [0, w] (g^2 is a normal density of
  /// standard deviation 1/a).
  double containment_leak(double w) const {
    const double s = a / std::numbers::sqrt2;
    return 0.5 * std::erfc(k0 * s) + 0.5 * std::erfc((w - k0) * s);
  }

  bool contained(double w) const { return containment_leak(w) <= 1e-3; }

  /// Upper end of the k support: (1 - delta) w with a cutoff, otherwise
  /// k0 + 8/a (gaussian mass beyond is below 1e-13).
  double support_upper(double w) const {
    return cutoff_delta ? (1.0 - *cutoff_delta) * w : k0 + 8.0 / a;
  }
};

/// g(k - k0) |T(k, L)| on the tunneling window 0 < k <= w.
inline double modulated_spectrum(double k, const GaussianSpectrum& spectrum,
                                 const BarrierConfig& barrier) {
  detail::require(k > 0.0 && k <= barrier.w(), "modulated_spectrum: k must lie in (0, w]");
  return spectrum.amplitude(k) * transmission_modulus(k, barrier);
}

struct KmaxResult {
  double k_max = 0.0;
  bool boundary_dominated = false;  ///< global maximum sits at k = w
  bool boundary_local_max = false;  ///< positive slope at k = w
  double value_at_max = 0.0;
  double value_at_w = 0.0;
  double containment_leak = 0.0;
  bool contained = true;
};

inline constexpr std::size_t kKmaxScanPoints = 4096;

/// Global maximizer of g |T| on (0, w]: dense scan, then golden-section
/// refinement around the best interior sample.
inline KmaxResult find_kmax(const GaussianSpectrum& spectrum, const BarrierConfig& barrier) {
  spectrum.validate();
  const double w = barrier.w();
  auto f = [&](double k) { return modulated_spectrum(k, spectrum, barrier); };

  KmaxResult out;
  out.containment_leak = spectrum.containment_leak(w);
  out.contained = out.containment_leak <= 1e-3;
  out.value_at_w = f(w);

  const std::size_t n = kKmaxScanPoints;
  std::size_t best = 1;
  double best_value = -1.0;
  for (std::size_t i = 1; i < n; ++i) {  // interior samples only
    const double v = f(w * static_cast<double>(i) / static_cast<double>(n));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double step = w / static_cast<double>(n);
  const double lo = step * static_cast<double>(best - 1);
  const double hi = std::min(w, step * static_cast<double>(best + 1));
  double k_interior = golden_section_max(f, std::max(lo, 1e-300), hi, 1e-10);
  double v_interior = f(k_interior);

  const double slope = (f(w) - f(w - 1e-6 * w)) / (1e-6 * w);
  out.boundary_local_max = slope > 0.0;

  if (out.value_at_w >= v_interior || k_interior > w * (1.0 - 1e-8)) {
    out.boundary_dominated = true;
    out.k_max = w;
    out.value_at_max = out.value_at_w;
  } else {
    out.k_max = k_interior;
    out.value_at_max = v_interior;
  }
  return out;
}

struct Table1Cell {
  double w_a = 0.0;
  double L_a = 0.0;
  double k_max_a = 0.0;
  bool boundary_dominated = false;
};

/// k_max a over a grid of barrier heights w a and widths L / a, L-major
/// (one row per L, columns in wa_list order).
inline std::vector<Table1Cell> table1_generate(double k0a, std::span<const double> wa_list,
                                               std::span<const double> La_list) {
  detail::require(!wa_list.empty() && !La_list.empty(), "table1: empty parameter list");
  detail::require(k0a > 0.0, "table1: k0_a must be positive");
  std::vector<Table1Cell> cells;
  cells.reserve(wa_list.size() * La_list.size());
  const GaussianSpectrum spectrum{k0a, 1.0, std::nullopt};
  for (double La : La_list) {
    detail::require(La >= 0.0, "table1: L_a must be non-negative");
    for (double wa : wa_list) {
      detail::require(wa > k0a, "table1: w_a must exceed k0_a");
      const KmaxResult r = find_kmax(spectrum, BarrierConfig::dimensionless(wa, La));
      cells.push_back({wa, La, r.k_max, r.boundary_dominated});
    }
  }
  return cells;
}

/// lim_{k -> w} |T|' / |T|, derived from the series of sinh(rho L)/rho.
inline double boundary_log_slope(double L, double w) {
  const double x = w * w * L * L;
  return w * L * L / 4.0 * (1.0 + x / 3.0) / (1.0 + x / 4.0);
}

/// The same limit with w L^2 in place of w^2 L^2 inside the brackets, as
/// the inequality is usually quoted. Diagnostic only.
inline double boundary_log_slope_printed(double L, double w) {
  const double x = w * L * L;
  return w * L * L / 4.0 * (1.0 + x / 3.0) / (1.0 + x / 4.0);
}

/// One-sided difference of ln|T| at k = w, extrapolated in the step.
inline double boundary_log_slope_numeric(double L, double w) {
  const BarrierConfig barrier = BarrierConfig::dimensionless(w, L);
  auto lnT = [&](double k) { return std::log(transmission_modulus(k, barrier)); };
  const double top = lnT(w);
  // First-order one-sided differences; eliminate O(h) and O(h^2) terms.
  double h = 1e-3 * w;
  std::vector<double> d;
  for (int i = 0; i < 4; ++i, h *= 0.5) d.push_back((top - lnT(w - h)) / h);
  for (int level = 1; level < 4; ++level) {
    const double factor = std::pow(2.0, level);
    for (std::size_t i = d.size() - 1; i >= static_cast<std::size_t>(level); --i)
      d[i] = d[i] + (d[i] - d[i - 1]) / (factor - 1.0);
  }
  return d.back();
}

struct DistortionReport {
  double log_derivative_at_w = 0.0;  ///< -g'(w - k0) / g(w - k0) = a^2 (w - k0) / 2
  double L_numeric = 0.0;            ///< onset of a positive slope of g|T| at k = w
  double L_literal = 0.0;            ///< sqrt(3/2) a (1 - k0/w)
  double L_rederived = 0.0;          ///< sqrt(3/2) a sqrt(1 - k0/w)
  double slope_check = 0.0;  ///< |analytic - numeric| boundary log-slope at L_numeric
  double printed_limit_at_onset = 0.0;
};

inline DistortionReport distortion_onset(const GaussianSpectrum& spectrum, double w) {
  spectrum.validate();
  detail::require(w > 0.0, "distortion_onset: w must be positive");
  detail::require(spectrum.k0 < w, "distortion_onset: requires k0 < w");
  const double a = spectrum.a;
  const double k0 = spectrum.k0;

  DistortionReport out;
  out.log_derivative_at_w = -spectrum.log_derivative(w);
  out.L_literal = std::sqrt(1.5) * a * (1.0 - k0 / w);
  out.L_rederived = std::sqrt(1.5) * a * std::sqrt(1.0 - k0 / w);

  // The boundary slope grows monotonically with L.
  auto excess = [&](double L) { return boundary_log_slope(L, w) - out.log_derivative_at_w; };
  double lo = 0.0;
  double hi = std::max(out.L_rederived, 1e-3);
  while (excess(hi) <= 0.0) hi *= 2.0;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  out.L_numeric = 0.5 * (lo + hi);
  out.slope_check =
      std::abs(boundary_log_slope(out.L_numeric, w) - boundary_log_slope_numeric(out.L_numeric, w));
  out.printed_limit_at_onset = boundary_log_slope_printed(out.L_numeric, w);
  return out;
}

/// Transit time of a spectrum cut off at (1 - delta) w: t = 2m / (w delta).
inline double cutoff_time_estimate(double delta, const BarrierConfig& barrier) {
  detail::require(delta > 0.0, "cutoff_time_estimate: delta = 0 diverges");
  detail::require(delta <= 1.0, "cutoff_time_estimate: delta must not exceed 1");
  return 2.0 * barrier.mass() / (barrier.w() * delta);
}

/// psi(x, 0) = Integral_0^{k_cut} dk/(2 pi) g(k - k0) e^{i k x}, with
/// k_cut = (1 - delta) w, or k0 + 8/a without a cutoff.
inline PacketField cutoff_packet_profile(const GaussianSpectrum& spectrum, double w,
                                         std::span<const double> x_grid,
                                         const QuadratureSpec& quad = {}) {
  spectrum.validate();
  const double k_cut = spectrum.support_upper(w);
  detail::require(k_cut > 0.0, "cutoff_packet_profile: empty k support");
  auto samples = converge_quadrature(quad, 0.0, k_cut, {}, [&](const QuadratureRule& rule) {
    return spectral_sum(rule, [&](double k) { return cplx{spectrum.amplitude(k), 0.0}; }, x_grid,
                        0.0, 0.0, 1.0);
  });
  return {std::vector<double>(x_grid.begin(), x_grid.end()), 0.0, std::move(samples.values)};
}

/// max |psi| over x in [lo, hi] divided by the global max |psi|.
inline double tail_amplitude(const PacketField& field, double lo, double hi) {
  double tail = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (field.x()[i] >= lo && field.x()[i] <= hi) tail = std::max(tail, std::abs(field.psi()[i]));
  return tail / field.max_modulus();
}

}  // namespace tunnel

#endif  // TUNNEL_SPECTRUM_HPP
