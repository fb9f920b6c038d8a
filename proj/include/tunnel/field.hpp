#ifndef TUNNEL_FIELD_HPP
#define TUNNEL_FIELD_HPP

// Sampled wave functions and the k-space quadrature that produces them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "tunnel/numerics.hpp"

namespace tunnel {

using cplx = std::complex<double>;

/// Composite Gauss-Legendre settings for k-integrals. The panel count is
/// doubled until the sampled field changes by less than `tolerance` times its
/// sup-norm.
struct QuadratureSpec {
  std::size_t panels = 16;
  std::size_t max_panels = 2048;
  double tolerance = 1e-8;
  bool check_convergence = true;  ///< false: evaluate once with `panels`
};

/// psi sampled on a strictly increasing grid at one time.
class PacketField {
 public:
  PacketField(std::vector<double> x, double t, std::vector<cplx> psi)
      : x_(std::move(x)), t_(t), psi_(std::move(psi)) {
    detail::require(x_.size() == psi_.size(), "PacketField: grid and samples differ in size");
    detail::require(x_.size() >= 3, "PacketField: need at least three grid points");
    for (std::size_t i = 1; i < x_.size(); ++i)
      detail::require(x_[i] > x_[i - 1], "PacketField: grid must be strictly increasing");
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<cplx>& psi() const { return psi_; }
  double t() const { return t_; }
  std::size_t size() const { return x_.size(); }

  double density(std::size_t i) const { return std::norm(psi_[i]); }

  std::size_t peak_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < psi_.size(); ++i)
      if (density(i) > density(best)) best = i;
    return best;
  }

  /// Grid position of the |psi|^2 maximum.
  double peak_position() const { return x_[peak_index()]; }

  /// Peak position refined by a parabola through the maximum and its neighbours.
  double refined_peak() const { return refined_peak_in(x_.front(), x_.back()); }

  /// Same, restricted to grid points in [lo, hi].
  double refined_peak_in(double lo, double hi) const {
    std::size_t best = x_.size();
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (x_[i] < lo || x_[i] > hi) continue;
      if (best == x_.size() || density(i) > density(best)) best = i;
    }
    detail::require(best < x_.size(), "PacketField: peak region contains no grid points");
    if (best == 0 || best + 1 == x_.size()) return x_[best];
    const double x0 = x_[best - 1], x1 = x_[best], x2 = x_[best + 1];
    const double y0 = density(best - 1), y1 = density(best), y2 = density(best + 1);
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);
    if (curv >= 0.0) return x1;
    const double xv = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
    return std::clamp(xv, x0, x2);
  }

  /// Number of local maxima of |psi|^2 above `fraction` of the global maximum.
  std::size_t count_peaks(double fraction = 0.1) const {
    const double top = density(peak_index());
    std::size_t count = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double d = density(i);
      const bool left_ok = i == 0 || d > density(i - 1);
      const bool right_ok = i + 1 == x_.size() || d >= density(i + 1);
      if (left_ok && right_ok && d >= fraction * top) ++count;
    }
    return count;
  }

  bool multimodal(double fraction = 0.1) const { return count_peaks(fraction) > 1; }

  /// Trapezoidal integral of |psi|^2.
  double norm() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x_.size(); ++i)
      s += 0.5 * (density(i) + density(i - 1)) * (x_[i] - x_[i - 1]);
    return s;
  }

  /// <x> weighted by |psi|^2 (trapezoidal).
  double centroid() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x_.size(); ++i)
      s += 0.5 * (x_[i] * density(i) + x_[i - 1] * density(i - 1)) * (x_[i] - x_[i - 1]);
    return s / norm();
  }

  /// RMS width about the centroid.
  double width() const {
    const double c = centroid();
    double s = 0.0;
    for (std::size_t i = 1; i < x_.size(); ++i) {
      const double a = (x_[i] - c) * (x_[i] - c) * density(i);
      const double b = (x_[i - 1] - c) * (x_[i - 1] - c) * density(i - 1);
      s += 0.5 * (a + b) * (x_[i] - x_[i - 1]);
    }
    return std::sqrt(s / norm());
  }

  double max_modulus() const { return std::abs(psi_[peak_index()]); }

 private:
  std::vector<double> x_;
  double t_;
  std::vector<cplx> psi_;
};

/// Outcome of a panel-doubling quadrature.
struct ConvergedSamples {
  std::vector<cplx> values;
  std::size_t panels = 0;
  double relative_change = 0.0;
};

/// Runs `eval(rule)` on [lo, hi] with doubling panel counts until successive
/// results agree to spec.tolerance relative to the sup-norm of the result.
template <class Eval>
ConvergedSamples converge_quadrature(const QuadratureSpec& spec, double lo, double hi,
                                     std::span<const double> breaks, Eval&& eval) {
  detail::require(spec.panels > 0 && spec.max_panels >= spec.panels,
                  "QuadratureSpec: need 0 < panels <= max_panels");
  detail::require(spec.tolerance > 0.0, "QuadratureSpec: tolerance must be positive");
  std::size_t panels = spec.panels;
  std::vector<cplx> previous = eval(composite_gauss_legendre(lo, hi, panels, breaks));
  if (!spec.check_convergence) return {std::move(previous), panels, 0.0};
  double change = 0.0;
  while (panels * 2 <= spec.max_panels) {
    panels *= 2;
    std::vector<cplx> current = eval(composite_gauss_legendre(lo, hi, panels, breaks));
    double scale = 0.0;
    change = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      scale = std::max(scale, std::abs(current[i]));
      change = std::max(change, std::abs(current[i] - previous[i]));
    }
    const double rel = scale > 0.0 ? change / scale : change;
    if (rel <= spec.tolerance) return {std::move(current), panels, rel};
    previous = std::move(current);
    change = rel;
  }
  std::ostringstream msg;
  msg << "k-quadrature did not converge: relative change " << change << " at " << panels
      << " panels exceeds tolerance " << spec.tolerance;
  throw ConvergenceError(msg.str());
}

/// psi(x, t) = Integral_lo^hi dk/(2 pi) A(k) exp[i k (x - x_ref) - i k^2 t / (2m)].
template <class Amplitude>
std::vector<cplx> spectral_sum(const QuadratureRule& rule, Amplitude&& amplitude,
                               std::span<const double> x, double t, double x_ref, double mass) {
  std::vector<cplx> weighted(rule.nodes.size());
  std::vector<double> time_phase(rule.nodes.size());
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double k = rule.nodes[j];
    weighted[j] = amplitude(k) * rule.weights[j] / (2.0 * std::numbers::pi);
    time_phase[j] = -k * k * t / (2.0 * mass);
  }
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    cplx acc{0.0, 0.0};
    const double dx = x[i] - x_ref;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      acc += weighted[j] * std::polar(1.0, rule.nodes[j] * dx + time_phase[j]);
    out[i] = acc;
  }
  return out;
}

}  // namespace tunnel

#endif  // TUNNEL_FIELD_HPP
