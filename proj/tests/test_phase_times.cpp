#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tunnel/phase_times.hpp"

using namespace tunnel;

TEST(TimeParams, Definitions) {
  const BarrierConfig b = BarrierConfig::dimensionless(4.0, 0.5);
  const TimeParams p = time_params(2.0, b);
  EXPECT_DOUBLE_EQ(p.k_eval, 2.0);
  EXPECT_NEAR(p.alpha, std::sqrt(12.0) * 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(p.n, 0.25);
  EXPECT_DOUBLE_EQ(p.tau, 0.25);
  EXPECT_THROW(time_params(4.0, b), DomainError);
  EXPECT_THROW(time_params(0.0, b), DomainError);
}

TEST(StandardTime, FrozenValueAtTableCell) {
  // w a = 4, L/a = 0.5, k = 2.1155.
  const BarrierConfig b = BarrierConfig::dimensionless(4.0, 0.5);
  const PhaseTimeResult r = standard_transit_time(2.1155, b);
  EXPECT_NEAR(r.time, 0.2744165133828488900879, 1e-14);
  EXPECT_NEAR(r.numerical, r.closed_form, 1e-10);
  EXPECT_EQ(r.method, TimeMethod::standard);
}

TEST(StandardTime, MatchesPhaseDerivativeOnRandomDraws) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::uniform_real_distribution<double> wd(0.5, 12.0);
  std::uniform_real_distribution<double> ad(0.0, 19.0);
  for (int i = 0; i < 200; ++i) {
    const double w = wd(rng);
    const double k = u(rng) * w;
    const double alpha = ad(rng);
    const double L = alpha / std::sqrt(w * w - k * k);
    const PhaseTimeResult r = standard_transit_time(k, BarrierConfig::dimensionless(w, L));
    if (r.closed_form < 1e-12) continue;
    ASSERT_NEAR(r.numerical / r.closed_form, 1.0, 1e-6) << "w=" << w << " k=" << k << " L=" << L;
  }
}

TEST(StandardTime, LargeAlphaBranchIsContinuous) {
  const BarrierConfig b = BarrierConfig::dimensionless(4.0, 1.0);
  const double k = 1.0;
  const double r = std::sqrt(15.0);
  const double below = standard_transit_time_closed(k, b.with_width(20.0 / r - 1e-12));
  const double above = standard_transit_time_closed(k, b.with_width(20.0 / r + 1e-12));
  EXPECT_NEAR(below, above, 1e-10);
}

TEST(StandardTime, ZeroWidth) {
  EXPECT_DOUBLE_EQ(standard_transit_time_closed(1.0, BarrierConfig::dimensionless(4.0, 0.0)), 0.0);
}

TEST(OpaqueLimit, ApproachedAtLargeAlpha) {
  const double w = 4.0, k = 2.0;
  const double r = std::sqrt(w * w - k * k);
  const BarrierConfig b = BarrierConfig::dimensionless(w, 30.0 / r);
  EXPECT_NEAR(standard_transit_time_closed(k, b) / opaque_limit_time(k, b), 1.0, 1e-6);
  EXPECT_THROW(opaque_limit_time(4.0, b), DomainError);
}

TEST(OpaqueLimit, GrowsWithoutBoundTowardBarrierTop) {
  const BarrierConfig b = BarrierConfig::dimensionless(4.0, 1.0);
  double last = 0.0;
  // k rho is largest at k = w/sqrt(2); beyond it t_OL only grows.
  for (double f = 0.75; f < 1.0; f = 0.5 * (f + 1.0)) {
    const double t = opaque_limit_time(f * 4.0, b);
    EXPECT_GT(t, last);
    last = t;
  }
  EXPECT_GT(last, 1e3);
}

TEST(AuxiliaryG, BranchesAndLimits) {
  EXPECT_DOUBLE_EQ(g_aux(0.0), 0.0);
  for (double a : {0.999e-3, 1.001e-3, 0.5, 5.0, 19.99, 20.01}) {
    const double s = std::sinh(a);
    EXPECT_NEAR(g_aux(a), (s * std::cosh(a) - a) / (s * s), 1e-12) << a;
  }
  EXPECT_NEAR(g_aux_over_alpha(0.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(g_aux(500.0), 1.0, 1e-15);
  EXPECT_THROW(g_aux(-1.0), DomainError);
}

TEST(BarrierTopTime, Limits) {
  const BarrierConfig b = BarrierConfig::dimensionless(4.0, 0.5);
  EXPECT_NEAR(barrier_top_transit_time(0.0, b), 4.0 * 0.5 / (3.0 * 4.0), 1e-15);
  // alpha >> 1: 2m/(w rho) with rho = alpha / L.
  const double alpha = 400.0;
  EXPECT_NEAR(barrier_top_transit_time(alpha, b), 2.0 / (4.0 * alpha / 0.5), 1e-12);
}

TEST(Rates, SmallAlphaLimits) {
  for (double n : {0.25, 0.5, 0.75}) {
    EXPECT_NEAR(rate_standard(1e-4, n), 1.0 + 1.0 / (2.0 * n), 1e-3) << n;
    EXPECT_NEAR(rate_scattering(1e-4, n), 1.0 + 1.0 / n, 1e-3) << n;
  }
  EXPECT_NEAR(rate_standard(1e-4, 1.0), 4.0 / 3.0, 1e-3);
  EXPECT_DOUBLE_EQ(rate_standard(0.0, 1.0), 4.0 / 3.0);
}

TEST(Rates, VanishForOpaqueBarriers) {
  for (double n : {0.25, 0.5, 0.75, 1.0}) {
    EXPECT_LT(rate_standard(1e3, n), 1e-2);
    EXPECT_LT(rate_scattering(1e3, n), 1e-2);
    EXPECT_NEAR(rate_standard(1e3, n), 2e-3, 1e-6);
  }
}

TEST(Rates, BranchesJoinSmoothly) {
  for (double n : {0.3, 0.9, 1.0}) {
    for (double a : {1e-3, 20.0}) {
      EXPECT_NEAR(rate_standard(a * (1 - 1e-9), n), rate_standard(a * (1 + 1e-9), n), 1e-8);
      EXPECT_NEAR(rate_scattering(a * (1 - 1e-9), n), rate_scattering(a * (1 + 1e-9), n), 1e-8);
    }
  }
}

TEST(Rates, StandardRateTimesTauIsTransitTime) {
  const BarrierConfig b = BarrierConfig::dimensionless(3.0, 0.8);
  for (double k : {0.5, 1.5, 2.8}) {
    const TimeParams p = time_params(k, b);
    EXPECT_NEAR(rate_standard(p.alpha, p.n) * p.tau, standard_transit_time_closed(k, b), 1e-12);
  }
}

TEST(Rates, RejectOutOfRange) {
  EXPECT_THROW(rate_standard(-1.0, 0.5), DomainError);
  EXPECT_THROW(rate_standard(1.0, 0.0), DomainError);
  EXPECT_THROW(rate_scattering(1.0, 1.5), DomainError);
}

TEST(Rates, NonCommutingLimitAtBarrierTop) {
  const RateLimitNote n1 = standard_rate_small_alpha_limit(1.0);
  EXPECT_FALSE(n1.commutes);
  EXPECT_NEAR(n1.evaluated, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(n1.fixed_n, 1.5, 1e-15);
  EXPECT_TRUE(standard_rate_small_alpha_limit(0.5).commutes);
}

TEST(ScatteringTime, FrozenValueAndPrintedDiscrepancy) {
  const BarrierConfig b = BarrierConfig::dimensionless(4.0, 0.5);
  const PhaseTimeResult r = scattering_phase_time(2.1155, b);
  EXPECT_NEAR(r.time, 0.3641300677411876581173, 1e-10);
  EXPECT_NEAR(r.closed_form, 0.3641300677411876581173, 1e-14);
  EXPECT_NEAR(r.printed_form, 0.0801208230449754696, 1e-14);
  EXPECT_EQ(r.method, TimeMethod::scattering);
}

TEST(ScatteringTime, ClosedFormMatchesDerivativeOnRandomDraws) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::uniform_real_distribution<double> wd(0.5, 12.0);
  std::uniform_real_distribution<double> ad(0.01, 19.0);
  for (int i = 0; i < 200; ++i) {
    const double w = wd(rng);
    const double k = u(rng) * w;
    const double L = ad(rng) / std::sqrt(w * w - k * k);
    const PhaseTimeResult r = scattering_phase_time(k, BarrierConfig::dimensionless(w, L));
    ASSERT_NEAR(r.numerical / r.closed_form, 1.0, 1e-6) << "w=" << w << " k=" << k << " L=" << L;
  }
}

TEST(Fig3a, CurvesAreNMajor) {
  const double ns[] = {0.5, 1.0};
  const double alphas[] = {0.1, 1.0, 10.0};
  const auto rows = fig3a_curves(ns, alphas);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_DOUBLE_EQ(rows[0].n, 0.5);
  EXPECT_DOUBLE_EQ(rows[3].n, 1.0);
  EXPECT_DOUBLE_EQ(rows[4].alpha, 1.0);
  EXPECT_DOUBLE_EQ(rows[4].r_standard, rate_standard(1.0, 1.0));
  const double bad_alpha[] = {0.0};
  EXPECT_THROW(fig3a_curves(ns, bad_alpha), DomainError);
}
