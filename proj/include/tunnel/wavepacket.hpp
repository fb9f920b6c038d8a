#ifndef TUNNEL_WAVEPACKET_HPP
#define TUNNEL_WAVEPACKET_HPP

// Direct synthesis of time-dependent packets from their k-space integrals:
// the packet transmitted through the barrier, the free incident packet, and
// the symmetric two-packet collision. Peak tracking turns snapshots into
// arrival times that can be set against the phase-time formulas.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "tunnel/barrier.hpp"
#include "tunnel/field.hpp"
#include "tunnel/phase_times.hpp"
#include "tunnel/spectrum.hpp"

namespace tunnel {

enum class TransmittedPhase {
  full,         ///< g |T| exp(i Theta)
  omit_theta,   ///< g |T| only: same envelope, no barrier phase delay
};

namespace detail {

inline ConvergedSamples transmitted_samples(const GaussianSpectrum& spectrum,
                                            const BarrierConfig& barrier,
                                            std::span<const double> x_grid, double t,
                                            const QuadratureSpec& quad, TransmittedPhase phase) {
  spectrum.validate();
  const double half = 0.5 * barrier.width();
  for (double x : x_grid)
    require(x >= half - 1e-12, "synthesize_transmitted: grid must satisfy x >= L/2");
  const double k_hi =
      spectrum.cutoff_delta ? std::min(barrier.w(), spectrum.support_upper(barrier.w())) : barrier.w();
  auto amplitude = [&](double k) {
    const double mod = spectrum.amplitude(k) * transmission_modulus(k, barrier);
    if (phase == TransmittedPhase::omit_theta) return cplx{mod, 0.0};
    return std::polar(mod, theta_phase(k, barrier));
  };
  return converge_quadrature(quad, 0.0, k_hi, {}, [&](const QuadratureRule& rule) {
    return spectral_sum(rule, amplitude, x_grid, t, half, barrier.mass());
  });
}

}  // namespace detail

/// psi^T(x, t) = Integral_0^w dk/(2 pi) g(k - k0) |T| exp[i k (x - L/2) - i k^2 t/(2m) + i Theta]
/// on a grid with x >= L/2. A spectrum cutoff lowers the upper limit to (1 - delta) w.
inline PacketField synthesize_transmitted(const GaussianSpectrum& spectrum,
                                          const BarrierConfig& barrier,
                                          std::span<const double> x_grid, double t,
                                          const QuadratureSpec& quad = {},
                                          TransmittedPhase phase = TransmittedPhase::full) {
  auto samples = detail::transmitted_samples(spectrum, barrier, x_grid, t, quad, phase);
  return {std::vector<double>(x_grid.begin(), x_grid.end()), t, std::move(samples.values)};
}

/// The free gaussian packet Integral dk/(2 pi) g(k - k0) exp[i k x - i k^2 t/(2m)], centred
/// at x = 0 at t = 0 and integrated over k0 +- 8/a.
inline PacketField synthesize_incident(const GaussianSpectrum& spectrum,
                                       std::span<const double> x_grid, double t,
                                       double mass = 1.0, const QuadratureSpec& quad = {}) {
  spectrum.validate();
  detail::require(mass > 0.0, "synthesize_incident: mass must be positive");
  const double lo = spectrum.k0 - 8.0 / spectrum.a;
  const double hi = spectrum.k0 + 8.0 / spectrum.a;
  auto samples = converge_quadrature(quad, lo, hi, {}, [&](const QuadratureRule& rule) {
    return spectral_sum(rule, [&](double k) { return cplx{spectrum.amplitude(k), 0.0}; },
                        x_grid, t, 0.0, mass);
  });
  return {std::vector<double>(x_grid.begin(), x_grid.end()), t, std::move(samples.values)};
}

/// Instant at which both incident peaks touch the barrier faces: -m L / (2 k0).
inline double collision_contact_time(const GaussianSpectrum& spectrum,
                                     const BarrierConfig& barrier) {
  return -barrier.mass() * barrier.width() / (2.0 * spectrum.k0);
}

namespace detail {

inline double collision_k_max(const GaussianSpectrum& spectrum) {
  return spectrum.k0 + 8.0 / spectrum.a;
}

}  // namespace detail

/// Symmetric collision of two identical packets with the barrier:
/// psi(x, t) = Integral_0^{k0 + 8/a} dk g(k - k0) [phi^L(k, x) + phi^L(k, -x)] e^{-i k^2 t/(2m)}.
/// `t_since_contact` is measured from the simultaneous arrival at the faces
/// and must be non-negative; the returned field carries that relative time.
inline PacketField synthesize_collision(const GaussianSpectrum& spectrum,
                                        const BarrierConfig& barrier,
                                        std::span<const double> x_grid, double t_since_contact,
                                        const QuadratureSpec& quad = {}) {
  spectrum.validate();
  detail::require(t_since_contact >= 0.0,
                  "synthesize_collision: time must not precede the simultaneous contact");
  const double t = t_since_contact + collision_contact_time(spectrum, barrier);
  const double m = barrier.mass();
  const double k_hi = detail::collision_k_max(spectrum);
  const double breaks[] = {barrier.w()};
  auto samples = converge_quadrature(quad, 0.0, k_hi, breaks, [&](const QuadratureRule& rule) {
    std::vector<ScatteringAmplitudes> amps;
    std::vector<cplx> weight;
    amps.reserve(rule.nodes.size());
    weight.reserve(rule.nodes.size());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double k = rule.nodes[j];
      amps.push_back(symmetric_amplitudes(k, barrier));
      weight.push_back(rule.weights[j] * spectrum.amplitude(k) *
                       std::polar(1.0, -k * k * t / (2.0 * m)));
    }
    std::vector<cplx> out(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double x = x_grid[i];
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j < amps.size(); ++j)
        acc += weight[j] * (left_incident_solution(amps[j], barrier, x) +
                            left_incident_solution(amps[j], barrier, -x));
      out[i] = acc;
    }
    return out;
  });
  return {std::vector<double>(x_grid.begin(), x_grid.end()), t_since_contact,
          std::move(samples.values)};
}

enum class OutgoingPhase {
  scattered,  ///< g (R_B + T_B) e^{-ikx}
  hard_wall,  ///< g e^{-ikL} e^{-ikx}: instant reflection at the faces
};

/// Outgoing part of the collision field left of the barrier (x <= -L/2),
/// without the incoming wave. Times are measured from the simultaneous contact.
inline PacketField collision_outgoing(const GaussianSpectrum& spectrum,
                                      const BarrierConfig& barrier,
                                      std::span<const double> x_grid, double t_since_contact,
                                      OutgoingPhase phase = OutgoingPhase::scattered,
                                      const QuadratureSpec& quad = {}) {
  spectrum.validate();
  for (double x : x_grid)
    detail::require(x <= -0.5 * barrier.width() + 1e-12,
                    "collision_outgoing: grid must satisfy x <= -L/2");
  const double t = t_since_contact + collision_contact_time(spectrum, barrier);
  const double L = barrier.width();
  const double breaks[] = {barrier.w()};
  auto amplitude = [&](double k) {
    const cplx s = phase == OutgoingPhase::scattered ? symmetric_amplitudes(k, barrier).sum
                                                     : std::polar(1.0, -k * L);
    return 2.0 * std::numbers::pi * spectrum.amplitude(k) * s;
  };
  // e^{-ikx} with x_ref = 0 is e^{ik(-x)}: evaluate on the mirrored grid.
  std::vector<double> mirrored(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) mirrored[i] = -x_grid[i];
  auto samples = converge_quadrature(
      quad, 0.0, detail::collision_k_max(spectrum), breaks, [&](const QuadratureRule& rule) {
        return spectral_sum(rule, amplitude, mirrored, t, 0.0, barrier.mass());
      });
  return {std::vector<double>(x_grid.begin(), x_grid.end()), t_since_contact,
          std::move(samples.values)};
}

/// Spectral bookkeeping of the collision: integrated |g|^2 in and |g (R_B + T_B)|^2
/// out, and the largest pointwise deviation of |R_B + T_B| g from g.
struct SpectralWeights {
  double incoming = 0.0;
  double outgoing = 0.0;
  double max_modulus_deviation = 0.0;
};

inline SpectralWeights collision_spectral_weights(const GaussianSpectrum& spectrum,
                                                  const BarrierConfig& barrier,
                                                  std::size_t panels = 256) {
  spectrum.validate();
  const double breaks[] = {barrier.w()};
  const QuadratureRule rule =
      composite_gauss_legendre(0.0, detail::collision_k_max(spectrum), panels, breaks);
  SpectralWeights out;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double k = rule.nodes[j];
    const double g = spectrum.amplitude(k);
    const double scattered = std::abs(g * symmetric_amplitudes(k, barrier).sum);
    out.incoming += rule.weights[j] * g * g;
    out.outgoing += rule.weights[j] * scattered * scattered;
    out.max_modulus_deviation = std::max(out.max_modulus_deviation, std::abs(scattered - g));
  }
  return out;
}

/// max over x of | |psi(x)| - |psi(-x)| | relative to max |psi|, on a grid
/// that is symmetric about 0.
inline double mirror_residual(const PacketField& field) {
  const std::size_t n = field.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(field.x()[i] == -field.x()[n - 1 - i], "mirror_residual: grid is not symmetric");
    worst = std::max(worst, std::abs(std::abs(field.psi()[i]) - std::abs(field.psi()[n - 1 - i])));
  }
  return worst / field.max_modulus();
}

/// Peak trajectory of a sequence of snapshots and its crossing of a plane.
struct ArrivalRecord {
  std::vector<double> times;
  std::vector<double> peaks;
  std::optional<double> arrival_time;  ///< empty: the peak never crossed the plane
  bool multimodal = false;  ///< snapshots bracketing the arrival (all, if none) had several peaks
};

/// Peak per snapshot (parabolic refinement within [region_lo, region_hi]) and
/// the first time the peak crosses `plane`, linearly interpolated.
inline ArrivalRecord track_peak(std::span<const PacketField> fields, double region_lo,
                                double region_hi, double plane) {
  detail::require(fields.size() >= 3, "track_peak: need at least three snapshots");
  detail::require(region_hi > region_lo, "track_peak: empty region");
  ArrivalRecord rec;
  std::vector<bool> multi;
  for (const PacketField& f : fields) {
    rec.times.push_back(f.t());
    rec.peaks.push_back(f.refined_peak_in(region_lo, region_hi));
    multi.push_back(f.multimodal());
  }
  for (std::size_t i = 1; i < rec.times.size(); ++i) {
    const double d0 = rec.peaks[i - 1] - plane;
    const double d1 = rec.peaks[i] - plane;
    if (d0 == 0.0 || (d0 < 0.0) != (d1 < 0.0) || d1 == 0.0) {
      const double s = d0 == 0.0 ? 0.0 : d0 / (d0 - d1);
      rec.arrival_time = rec.times[i - 1] + s * (rec.times[i] - rec.times[i - 1]);
      rec.multimodal = multi[i - 1] || multi[i];
      break;
    }
  }
  if (!rec.arrival_time)
    for (bool m : multi) rec.multimodal = rec.multimodal || m;
  return rec;
}

/// Empirical arrival of the transmitted peak set against the phase-time formula
/// evaluated at the modulated-spectrum maximum.
struct TransmissionTiming {
  KmaxResult kmax;
  double tau = 0.0;              ///< m L / k_max
  double t_spm = 0.0;            ///< standard transit time at k_max
  double t_spm_k0 = 0.0;         ///< standard transit time at k0
  double plane = 0.0;            ///< arrival plane
  double arrival_full = 0.0;     ///< transmitted packet
  double arrival_reference = 0.0;  ///< same envelope without the barrier phase
  double delay = 0.0;            ///< arrival_full - arrival_reference
  double discrepancy_over_tau = 0.0;
  bool spm_consistent = false;  ///< |delay - t_spm| <= band * tau
  bool multimodal = false;
  bool filter_effect = false;
};

struct TimingOptions {
  double band = 0.05;       ///< agreement band in units of tau
  double plane_offset = 1.0;  ///< plane at L/2 + plane_offset * a
  double x_span = 4.0;      ///< grid covers [L/2, L/2 + x_span * a]
  std::size_t x_points = 801;
  double dt = 0.01;         ///< snapshot spacing in units of m a^2
  QuadratureSpec quad{};
};

namespace detail {

// Steps snapshots forward until the peak has crossed `plane` (plus one extra
// snapshot), with the panel count fixed after a convergence check at both
// ends of the window.
inline ArrivalRecord transmitted_arrival(const GaussianSpectrum& spectrum,
                                         const BarrierConfig& barrier,
                                         std::span<const double> x_grid, double plane, double dt,
                                         double t_end, TransmittedPhase phase,
                                         const QuadratureSpec& quad) {
  QuadratureSpec fixed = quad;
  std::size_t panels = quad.panels;
  for (double probe_t : {0.0, t_end})
    panels = std::max(
        panels, transmitted_samples(spectrum, barrier, x_grid, probe_t, quad, phase).panels);
  fixed.panels = panels;
  fixed.max_panels = panels;
  fixed.check_convergence = false;

  std::vector<PacketField> fields;
  ArrivalRecord rec;
  for (double t = 0.0; t <= t_end + 0.5 * dt; t += dt) {
    fields.push_back(synthesize_transmitted(spectrum, barrier, x_grid, t, fixed, phase));
    if (fields.size() >= 3) {
      rec = track_peak(fields, x_grid.front(), x_grid.back(), plane);
      if (rec.arrival_time && rec.times.back() > *rec.arrival_time + dt) break;
    }
  }
  return rec;
}

}  // namespace detail

inline TransmissionTiming transmitted_timing(const GaussianSpectrum& spectrum,
                                             const BarrierConfig& barrier,
                                             const TimingOptions& opt = {}) {
  detail::require(barrier.width() > 0.0, "transmitted_timing: needs a barrier of positive width");
  TransmissionTiming out;
  out.kmax = find_kmax(spectrum, barrier);
  const double k_eval = out.kmax.boundary_dominated ? barrier.w() * (1.0 - 1e-9) : out.kmax.k_max;
  out.tau = barrier.mass() * barrier.width() / out.kmax.k_max;
  out.t_spm = standard_transit_time_closed(k_eval, barrier);
  out.t_spm_k0 = standard_transit_time_closed(spectrum.k0, barrier);

  const double half = 0.5 * barrier.width();
  out.plane = half + opt.plane_offset * spectrum.a;
  const std::vector<double> x = linspace(half, half + opt.x_span * spectrum.a, opt.x_points);

  // Window long enough for the slowest estimate to reach the plane.
  const double travel = barrier.mass() * (out.plane - half) / out.kmax.k_max;
  const double t_end = 2.0 * (travel + std::max(out.t_spm, out.t_spm_k0)) + 0.5;

  const ArrivalRecord full = detail::transmitted_arrival(spectrum, barrier, x, out.plane, opt.dt,
                                                         t_end, TransmittedPhase::full, opt.quad);
  const ArrivalRecord ref = detail::transmitted_arrival(
      spectrum, barrier, x, out.plane, opt.dt, t_end, TransmittedPhase::omit_theta, opt.quad);
  if (!full.arrival_time || !ref.arrival_time)
    throw ConvergenceError("transmitted_timing: peak never reached the plane");
  out.arrival_full = *full.arrival_time;
  out.arrival_reference = *ref.arrival_time;
  out.delay = out.arrival_full - out.arrival_reference;
  out.discrepancy_over_tau = (out.delay - out.t_spm) / out.tau;
  out.spm_consistent = std::abs(out.discrepancy_over_tau) <= opt.band;
  out.multimodal = full.multimodal || out.kmax.boundary_local_max;
  out.filter_effect = out.multimodal || out.kmax.boundary_dominated || !out.spm_consistent;
  return out;
}

}  // namespace tunnel

#endif  // TUNNEL_WAVEPACKET_HPP
