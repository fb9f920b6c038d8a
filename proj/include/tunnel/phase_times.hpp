#ifndef TUNNEL_PHASE_TIMES_HPP
#define TUNNEL_PHASE_TIMES_HPP

// Phase (stationary-phase) times for the rectangular barrier and their
// dimensionless rates t / tau, tau = m L / k.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "tunnel/barrier.hpp"
#include "tunnel/numerics.hpp"

namespace tunnel {

/// Parameters shared by all time formulas at one evaluation wavenumber.
struct TimeParams {
  double k_eval = 0.0;
  double alpha = 0.0;  ///< rho(k_eval) L
  double n = 0.0;      ///< k_eval^2 / w^2
  double tau = 0.0;    ///< classical traversal time m L / k_eval
};

inline TimeParams time_params(double k_eval, const BarrierConfig& barrier) {
  detail::require(k_eval > 0.0 && k_eval < barrier.w(),
                  "phase times: k_eval must lie strictly inside (0, w)");
  const double r = rho(k_eval, barrier).rho();
  return {k_eval, r * barrier.width(), k_eval * k_eval / barrier.w2(),
          barrier.mass() * barrier.width() / k_eval};
}

enum class TimeMethod { standard, opaque, scattering, numerical_derivative };

struct PhaseTimeResult {
  double time = 0.0;  ///< the binding value
  TimeMethod method = TimeMethod::standard;
  double closed_form = 0.0;
  double numerical = 0.0;        ///< (m/k) d(phase)/dk by Richardson-extrapolated differences
  double numerical_error = 0.0;  ///< Richardson error estimate
  double printed_form = std::numeric_limits<double>::quiet_NaN();
  TimeParams params;
};

namespace detail {

// Initial step for differentiating a phase on (0, w): stay well inside the
// interval and away from the origin.
inline double derivative_step(double k, double w) {
  return 0.05 * std::min(k, w - k);
}

}  // namespace detail

/// Closed-form standard transit time t_T = (m/k) dTheta/dk, written in a
/// form with no 0/0 as rho -> 0 and no overflow for large alpha.
inline double standard_transit_time_closed(double k, const BarrierConfig& barrier) {
  const TimeParams p = time_params(k, barrier);
  const double m = barrier.mass();
  const double L = barrier.width();
  const double w2 = barrier.w2();
  const double w4 = w2 * w2;
  const double k2 = k * k;
  const double rho2 = rho(k, barrier).rho2;
  if (L == 0.0) return 0.0;
  const double a = p.alpha;
  if (a > 20.0) {
    // Divide numerator and denominator by sinh^2(alpha).
    const double inv_s2 = inv_sinh_sq(a);
    const double num = w4 / std::tanh(a) - (2.0 * k2 - w2) * k2 * a * inv_s2;
    const double den = 4.0 * k2 * rho2 * inv_s2 + w4;
    return 2.0 * m / (k * std::sqrt(rho2)) * num / den;
  }
  // N / (alpha rho^2) and D / rho^2 with alpha = rho L.
  const double shc_a = shc(a);
  const double num = w4 * L * L * 4.0 * shc_m1_over_x2(2.0 * a) + 3.0 * w2 - 2.0 * rho2;
  const double den = 4.0 * k2 + w4 * L * L * shc_a * shc_a;
  return 2.0 * m * L / k * num / den;
}

inline PhaseTimeResult standard_transit_time(double k_eval, const BarrierConfig& barrier) {
  PhaseTimeResult out;
  out.method = TimeMethod::standard;
  out.params = time_params(k_eval, barrier);
  out.closed_form = standard_transit_time_closed(k_eval, barrier);
  const auto [d, err] = richardson_derivative(
      [&](double k) { return theta_phase(k, barrier); }, k_eval,
      detail::derivative_step(k_eval, barrier.w()));
  out.numerical = barrier.mass() / k_eval * d;
  out.numerical_error = barrier.mass() / k_eval * err;
  out.time = out.closed_form;
  return out;
}

/// Opaque-limit (alpha -> infinity) transit time 2m / (k rho(k)).
inline double opaque_limit_time(double k_eval, const BarrierConfig& barrier) {
  detail::require(k_eval > 0.0 && k_eval < barrier.w(),
                  "opaque_limit_time: k_eval must lie strictly inside (0, w); it diverges at w");
  return 2.0 * barrier.mass() / (k_eval * rho(k_eval, barrier).rho());
}

/// G(alpha) = [sinh(alpha) cosh(alpha) - alpha] / sinh^2(alpha).
inline double g_aux(double alpha) {
  detail::require(alpha >= 0.0, "g_aux: alpha must be non-negative");
  if (alpha < 1e-3) {
    const double a2 = alpha * alpha;
    return alpha * (2.0 / 3.0 - a2 * (4.0 / 45.0 - a2 * 4.0 / 315.0));
  }
  if (alpha > 20.0) return 1.0 / std::tanh(alpha) - alpha * inv_sinh_sq(alpha);
  // sinh(2a)/2 - a = 2 a^3 (sinh(2a)/(2a) - 1) / (2a)^2 * 4 / 2
  return 4.0 * alpha * alpha * alpha * shc_m1_over_x2(2.0 * alpha) * inv_sinh_sq(alpha);
}

/// G(alpha) / alpha, finite at 0 where it equals 2/3.
inline double g_aux_over_alpha(double alpha) {
  detail::require(alpha >= 0.0, "g_aux_over_alpha: alpha must be non-negative");
  if (alpha < 1e-3) {
    const double a2 = alpha * alpha;
    return 2.0 / 3.0 - a2 * (4.0 / 45.0 - a2 * 4.0 / 315.0);
  }
  return g_aux(alpha) / alpha;
}

/// Transit time with k_max pinned to the barrier top: t = (2 m L / w) G(alpha) / alpha.
/// Tends to 4 m L / (3 w) as alpha -> 0 and to 2m / (w rho) for alpha >> 1.
inline double barrier_top_transit_time(double alpha, const BarrierConfig& barrier) {
  return 2.0 * barrier.mass() * barrier.width() / barrier.w() * g_aux_over_alpha(alpha);
}

/// R_T(alpha) = t_T / tau for the standard tunneling phase time.
inline double rate_standard(double alpha, double n) {
  detail::require(alpha >= 0.0, "rate_standard: alpha must be non-negative");
  detail::require(n > 0.0 && n <= 1.0, "rate_standard: n must lie in (0, 1]");
  const double gap = (1.0 - n) * (1.0 + 2.0 * n);  // 1 - n(2n - 1)
  const double gap_den = 4.0 * n * (1.0 - n);
  if (alpha == 0.0) return n == 1.0 ? 4.0 / 3.0 : 1.0 + 1.0 / (2.0 * n);
  if (alpha < 1e-3) {
    const double a2 = alpha * alpha;
    const double num = gap + a2 * (2.0 / 3.0 + a2 * 2.0 / 15.0);
    const double den = gap_den + a2 * (1.0 + a2 / 3.0);
    return 2.0 * num / den;
  }
  if (alpha > 20.0) {
    const double inv_s2 = inv_sinh_sq(alpha);
    const double num = 1.0 / std::tanh(alpha) - alpha * n * (2.0 * n - 1.0) * inv_s2;
    const double den = gap_den * inv_s2 + 1.0;
    return 2.0 / alpha * num / den;
  }
  const double s = std::sinh(alpha);
  const double num = gap + 4.0 * alpha * alpha * shc_m1_over_x2(2.0 * alpha);
  const double den = gap_den + s * s;
  return 2.0 * num / den;
}

/// R^phi_T(alpha) = t^phi_T / tau for the collision (summed-amplitude) phase time.
inline double rate_scattering(double alpha, double n) {
  detail::require(alpha >= 0.0, "rate_scattering: alpha must be non-negative");
  detail::require(n > 0.0 && n <= 1.0, "rate_scattering: n must lie in (0, 1]");
  if (alpha > 20.0) {
    const double sech = 1.0 / std::cosh(alpha);
    return 2.0 / alpha * (n * alpha * sech + std::tanh(alpha)) / ((2.0 * n - 1.0) * sech + 1.0);
  }
  double ch = 0.0;
  if (alpha < 1e-3) {
    const double a2 = alpha * alpha;
    ch = 1.0 + a2 / 2.0 * (1.0 + a2 / 12.0);
  } else {
    ch = std::cosh(alpha);
  }
  return 2.0 * (n + shc(alpha)) / (2.0 * n - 1.0 + ch);
}

/// The alpha -> 0 limits of R_T at one n. At n = 1 the evaluated limit (4/3)
/// and the fixed-n formula 1 + 1/(2n) (3/2) differ: the limits do not commute.
struct RateLimitNote {
  double n = 0.0;
  double evaluated = 0.0;  ///< rate_standard(0, n)
  double fixed_n = 0.0;    ///< 1 + 1/(2n)
  bool commutes = true;
};

inline RateLimitNote standard_rate_small_alpha_limit(double n) {
  RateLimitNote note;
  note.n = n;
  note.evaluated = rate_standard(0.0, n);
  note.fixed_n = 1.0 + 1.0 / (2.0 * n);
  note.commutes = std::abs(note.evaluated - note.fixed_n) < 1e-12;
  return note;
}

/// Scattering time of the symmetric collision. The binding value is the
/// numerical -(m/k0) dphi/dk (the outgoing peak delay, given
/// R_B + T_B = exp{-i[kL + phi]}); the closed form is tau * R^phi_T.
/// `printed_form` evaluates the cosh^2 variant for comparison.
inline PhaseTimeResult scattering_phase_time(double k0, const BarrierConfig& barrier) {
  PhaseTimeResult out;
  out.method = TimeMethod::scattering;
  out.params = time_params(k0, barrier);
  const TimeParams& p = out.params;
  const double m = barrier.mass();
  const double w2 = barrier.w2();

  out.closed_form = p.tau * rate_scattering(p.alpha, p.n);

  const double r = rho(k0, barrier).rho();
  if (p.alpha < 300.0) {
    const double ch = std::cosh(p.alpha);
    out.printed_form = 2.0 * m / (k0 * r) * (w2 * std::sinh(p.alpha) - p.alpha * k0 * k0) /
                       (2.0 * k0 * k0 - w2 + w2 * ch * ch);
  }

  if (barrier.width() == 0.0) {
    out.numerical = 0.0;
    out.numerical_error = 0.0;
  } else {
    const auto [d, err] =
        richardson_derivative([&](double k) { return phi_phase(k, barrier); }, k0,
                              detail::derivative_step(k0, barrier.w()));
    out.numerical = -m / k0 * d;
    out.numerical_error = m / k0 * err;
  }
  out.time = out.numerical;
  return out;
}

struct RateRow {
  double alpha = 0.0;
  double n = 0.0;
  double r_standard = 0.0;
  double r_scattering = 0.0;
};

/// Rate curves on an alpha grid for each n, n-major.
inline std::vector<RateRow> fig3a_curves(std::span<const double> n_values,
                                         std::span<const double> alpha_grid) {
  for (double n : n_values) detail::require(n > 0.0 && n <= 1.0, "fig3a_curves: n must lie in (0, 1]");
  for (double a : alpha_grid) detail::require(a > 0.0, "fig3a_curves: alpha grid must be positive");
  std::vector<RateRow> rows;
  rows.reserve(n_values.size() * alpha_grid.size());
  for (double n : n_values)
    for (double a : alpha_grid) rows.push_back({a, n, rate_standard(a, n), rate_scattering(a, n)});
  return rows;
}

}  // namespace tunnel

#endif  // TUNNEL_PHASE_TIMES_HPP
