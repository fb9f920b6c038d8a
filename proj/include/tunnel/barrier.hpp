#ifndef TUNNEL_BARRIER_HPP
#define TUNNEL_BARRIER_HPP

// Exact single-wavenumber scattering by the rectangular barrier
// V(x) = V0 on [-L/2, L/2], zero elsewhere, with hbar = 1.
//
// All closed forms are written in terms of rho^2 = w^2 - k^2 so that one
// expression covers the tunneling branch (k < w), the removable point k = w
// and the trigonometric continuation above the barrier (k > w).

#include <cmath>
#include <complex>

#include "tunnel/numerics.hpp"

namespace tunnel {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Barrier height/width and particle mass. w = sqrt(2 m V0) is the wavenumber
/// at the barrier top.
class BarrierConfig {
 public:
  BarrierConfig(double mass, double height, double width)
      : mass_(mass), height_(height), width_(width), w2_(2.0 * mass * height) {
    detail::require(mass > 0.0 && std::isfinite(mass), "BarrierConfig: mass must be positive");
    detail::require(height > 0.0 && std::isfinite(height),
                    "BarrierConfig: barrier height must be positive");
    detail::require(width >= 0.0 && std::isfinite(width),
                    "BarrierConfig: barrier width must be non-negative");
    w_ = std::sqrt(w2_);
  }

  /// Units of the packet width a with m = 1: w_a = w a, L_a = L / a.
  static BarrierConfig dimensionless(double w_a, double L_a) {
    detail::require(w_a > 0.0, "BarrierConfig: w_a must be positive");
    return BarrierConfig(1.0, 0.5 * w_a * w_a, L_a);
  }

  double mass() const { return mass_; }
  double height() const { return height_; }
  double width() const { return width_; }
  double w() const { return w_; }
  double w2() const { return w2_; }

  BarrierConfig with_width(double width) const { return {mass_, height_, width}; }

 private:
  double mass_;
  double height_;
  double width_;
  double w2_;
  double w_;
};

/// rho(k) = sqrt(w^2 - k^2); above the barrier rho = i q with q = sqrt(k^2 - w^2).
struct EvanescentWavenumber {
  double k = 0.0;
  double rho2 = 0.0;

  bool above_barrier() const { return rho2 < 0.0; }
  /// Decay constant; zero above the barrier.
  double rho() const { return rho2 > 0.0 ? std::sqrt(rho2) : 0.0; }
  /// Oscillation wavenumber inside the barrier; zero below the barrier top.
  double q() const { return rho2 < 0.0 ? std::sqrt(-rho2) : 0.0; }
};

inline EvanescentWavenumber rho(double k, const BarrierConfig& barrier) {
  detail::require(k >= 0.0 && std::isfinite(k), "rho: wavenumber must be non-negative");
  return {k, (barrier.w() - k) * (barrier.w() + k)};
}

namespace detail {

inline void require_positive_k(double k) {
  require(k > 0.0 && std::isfinite(k), "wavenumber must be positive (k = 0 is singular)");
}

}  // namespace detail

/// |T(k, L)| = {1 + w^4 sinh^2(rho L) / (4 k^2 rho^2)}^{-1/2}.
inline double transmission_modulus(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  const double L = barrier.width();
  const double w2 = barrier.w2();
  if (r2 > 0.0 && std::sqrt(r2) * L > 300.0) {
    const double r = std::sqrt(r2);
    const double z = r * L;
    // log of w^2 sinh(z) / (2 k rho)
    const double log_amp = std::log(w2) + z - std::log(2.0) + std::log1p(-std::exp(-2.0 * z)) -
                           std::log(r) - std::log(2.0 * k);
    const double log_u = 2.0 * log_amp;
    return std::exp(-0.5 * (log_u + std::log1p(std::exp(-log_u))));
  }
  const double s = sinhc(r2, L);
  const double u = (w2 * s) * (w2 * s) / (4.0 * k * k);
  return 1.0 / std::sqrt(1.0 + u);
}

/// Transmission phase Theta(k, L) relative to the free plane wave across the
/// barrier: T = |T| exp(i Theta) exp(-i k L). Continuous below the barrier,
/// principal branch above it.
inline double theta_phase(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  const double L = barrier.width();
  const double num = 2.0 * k * k - barrier.w2();
  if (r2 >= 0.0) return std::atan2(num * tanhc(r2, L), 2.0 * k);
  return std::atan2(num * sinhc(r2, L), 2.0 * k * cosh_c(r2, L));
}

/// The single-argument form without the factor 2 in the denominator. Kept
/// only for comparison; it is not the phase of the matching solution.
inline double theta_phase_printed(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  detail::require(r2 >= 0.0, "theta_phase_printed: defined for k <= w only");
  return std::atan((2.0 * k * k - barrier.w2()) * tanhc(r2, barrier.width()) / k);
}

/// phi(k, L) of the summed collision amplitude R_B + T_B = exp{-i[k L + phi]},
/// two-argument branch: phi(L = 0) = 0 and exp(-i phi) is exact.
inline double phi_phase(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  const double L = barrier.width();
  const double w2 = barrier.w2();
  const double k2 = k * k;
  if (r2 >= 0.0) {
    const double sech = 1.0 / std::cosh(std::sqrt(r2) * L);
    return std::atan2(2.0 * k * r2 * tanhc(r2, L), w2 * sech + (2.0 * k2 - w2));
  }
  return std::atan2(2.0 * k * r2 * sinhc(r2, L), w2 + (2.0 * k2 - w2) * cosh_c(r2, L));
}

/// Everything known about one plane-wave component of the symmetric collision.
struct ScatteringAmplitudes {
  double k = 0.0;
  double modulus = 0.0;  ///< |T| of the standard single-packet problem
  double theta = 0.0;    ///< Theta(k, L)
  cplx reflection;       ///< R_B: reflected amplitude of one incident side
  cplx transmission;     ///< T_B: transmitted amplitude of the other side
  cplx sum;              ///< R_B + T_B, unimodular
  double phi = 0.0;      ///< sum = exp{-i[k L + phi]}
};

/// Reflection and transmission amplitudes of the continuity-matching solution
/// for a wave incident from either side. For the symmetric barrier the left-
/// and right-incident amplitudes coincide, so one pair serves both sides.
///
/// Evaluated in a form that factors out cosh(rho L), so it stays finite for
/// arbitrarily opaque barriers.
inline ScatteringAmplitudes symmetric_amplitudes(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  const double L = barrier.width();
  const double w2 = barrier.w2();
  const double mismatch = (2.0 * k * k - w2) / (2.0 * k);  // (k^2 - rho^2) / 2k
  const cplx plane = std::polar(1.0, -k * L);

  ScatteringAmplitudes out;
  out.k = k;
  if (r2 >= 0.0) {
    const double th = tanhc(r2, L);
    const double sech = 1.0 / std::cosh(std::sqrt(r2) * L);
    const cplx den = 1.0 - kI * (mismatch * th);
    out.transmission = plane * sech / den;
    out.reflection = -kI * (0.5 * w2 / k * th) * plane / den;
  } else {
    const double c = cosh_c(r2, L);
    const double s = sinhc(r2, L);
    const cplx den = c - kI * (mismatch * s);
    out.transmission = plane / den;
    out.reflection = -kI * (0.5 * w2 / k * s) * plane / den;
  }
  out.sum = out.reflection + out.transmission;
  out.modulus = transmission_modulus(k, barrier);
  out.theta = theta_phase(k, barrier);
  out.phi = phi_phase(k, barrier);
  return out;
}

/// The collision amplitudes and their sum as closed forms in Theta and
/// exp(rho L), evaluated verbatim (with exp(2 rho L) factored out). Diagnostic
/// only: the two amplitudes do not add up to the closed-form sum.
struct PrintedCollisionForms {
  cplx reflection;
  cplx transmission;
  cplx closed_sum;
  bool indeterminate = false;  ///< L = 0, where the amplitude forms are 0/0
};

inline PrintedCollisionForms printed_collision_amplitudes(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  detail::require(r2 > 0.0, "printed_collision_amplitudes: defined for 0 < k < w");
  const double L = barrier.width();
  const double e1 = std::exp(-std::sqrt(r2) * L);  // exp(-rho L)
  const double e2 = e1 * e1;
  const cplx plane = std::polar(1.0, -k * L);
  const cplx eth = std::polar(1.0, theta_phase(k, barrier));

  PrintedCollisionForms out;
  out.indeterminate = (L == 0.0);
  if (!out.indeterminate) {
    const cplx den = e2 - eth;
    out.reflection = plane * eth * (e2 - 1.0) / den;
    out.transmission = plane * e1 * (1.0 - eth * eth) / den;
  }
  out.closed_sum = plane * (1.0 + e1 * eth) / (e1 + eth);
  return out;
}

/// Standard single-packet amplitudes from an independent 2x2 transfer-matrix
/// product (continuity of psi and psi' at both faces). Reliable while
/// exp(rho L) is representable.
struct OracleAmplitudes {
  cplx transmission;
  cplx reflection;
};

namespace detail {

struct Mat2 {
  cplx a, b, c, d;
};

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

inline Mat2 inverse(const Mat2& m) {
  const cplx det = m.a * m.d - m.b * m.c;
  return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

// Maps plane-wave coefficients (A, B) of A e^{i kappa x} + B e^{-i kappa x}
// to (psi, psi') at x. kappa = 0 uses the basis {1, x}.
inline Mat2 wave_matrix(cplx kappa, double x) {
  if (kappa == cplx{0.0, 0.0}) return {1.0, x, 0.0, 1.0};
  const cplx ep = std::exp(kI * kappa * x);
  const cplx em = std::exp(-kI * kappa * x);
  return {ep, em, kI * kappa * ep, -kI * kappa * em};
}

}  // namespace detail

inline OracleAmplitudes transfer_matrix_oracle(double k, const BarrierConfig& barrier) {
  detail::require_positive_k(k);
  const double L = barrier.width();
  const double x1 = -0.5 * L;
  const double x2 = 0.5 * L;
  const cplx outside{k, 0.0};
  const cplx inside = std::sqrt(cplx{k * k - barrier.w2(), 0.0});

  // Coefficients on the far side are (T, 0); carry them back to the near side.
  using detail::inverse;
  using detail::mul;
  using detail::wave_matrix;
  const detail::Mat2 across =
      mul(mul(inverse(wave_matrix(outside, x1)), wave_matrix(inside, x1)),
          mul(inverse(wave_matrix(inside, x2)), wave_matrix(outside, x2)));
  // (A0, B0) = across * (T, 0) with A0 = 1.
  const cplx t = 1.0 / across.a;
  return {t, across.c * t};
}

enum class Incidence { left, right };

/// alpha_B, beta_B of the interior field. Left incidence:
/// alpha e^{-rho x} + beta e^{rho x}; right incidence: alpha e^{rho x} + beta e^{-rho x}.
struct InteriorCoefficients {
  cplx alpha;
  cplx beta;
};

inline InteriorCoefficients interior_matching(double k, const BarrierConfig& barrier,
                                              Incidence side = Incidence::left) {
  detail::require_positive_k(k);
  const double r2 = rho(k, barrier).rho2;
  detail::require(r2 > 0.0, "interior_matching: requires 0 < k < w");
  detail::require(barrier.width() > 0.0, "interior_matching: barrier of zero width has no interior");
  const double r = std::sqrt(r2);
  const double L = barrier.width();
  const cplx t = symmetric_amplitudes(k, barrier).transmission;
  const cplx ratio = kI * (k / r);
  // Match to the purely transmitted wave on the exit face; the growing
  // exponential is paired with the decaying one so neither overflows for
  // moderate rho L.
  const double face = side == Incidence::left ? 0.5 * L : -0.5 * L;
  const cplx exit_value =
      t * std::polar(1.0, side == Incidence::left ? k * face : -k * face);
  InteriorCoefficients out;
  out.alpha = 0.5 * exit_value * (1.0 - ratio) * std::exp(r * std::abs(face));
  out.beta = 0.5 * exit_value * (1.0 + ratio) * std::exp(-r * std::abs(face));
  return out;
}

/// The left-incident stationary solution phi^L(k, x) over all three regions
/// (e^{ikx} + R e^{-ikx} | interior | T e^{ikx}). The interior is propagated
/// from the exit face with cosh/sinhc, which is analytic through k = w.
/// The right-incident solution is phi^L(k, -x).
inline cplx left_incident_solution(const ScatteringAmplitudes& amp, const BarrierConfig& barrier,
                                   double x) {
  const double k = amp.k;
  const double half = 0.5 * barrier.width();
  if (x <= -half) return std::polar(1.0, k * x) + amp.reflection * std::polar(1.0, -k * x);
  if (x >= half) return amp.transmission * std::polar(1.0, k * x);
  const double r2 = rho(k, barrier).rho2;
  const double s = x - half;  // <= 0
  const cplx exit_value = amp.transmission * std::polar(1.0, k * half);
  return exit_value * (cosh_c(r2, s) + kI * k * sinhc(r2, s));
}

}  // namespace tunnel

#endif  // TUNNEL_BARRIER_HPP
