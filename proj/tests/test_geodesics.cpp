#include <gtest/gtest.h>

#include <vector>

#include "qgeo/geodesics.hpp"
#include "qgeo/oracles.hpp"

using namespace qgeo;

namespace {

GeodesicSpec sphere_spec(double theta, double phi, double theta_dot, double phi_dot) {
  return {MetricKind::FubiniStudy, 1.0, theta, phi, 0.0, theta_dot, phi_dot};
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

double sup_error_against(const GreatCircleGeodesic& g, const NumericGeodesic& n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n.eta.size(); ++i) {
    const auto x = g.position(n.eta[i], BranchMode::Unwrapped, WindowPolicy::Continue);
    worst = std::max({worst, std::abs(x[0] - n.position[i][0]), std::abs(x[1] - n.position[i][1])});
  }
  return worst;
}

}  // namespace

TEST(FsGeodesic, Equator) {
  const auto g = fs_geodesic(sphere_spec(pi / 2.0, 0.3, 0.0, 1.0));
  EXPECT_NEAR(g.c_fs(), 1.0, 1e-15);
  EXPECT_NEAR(g.a_fs(), 0.0, 1e-15);
  for (double eta : {0.0, 0.5, 1.4, 3.0}) {
    EXPECT_NEAR(g.theta(eta), pi / 2.0, 1e-15);
    EXPECT_NEAR(g.phi(eta), 0.3 + eta, 1e-14);
  }
}

TEST(FsGeodesic, Meridian) {
  const auto g = fs_geodesic(sphere_spec(pi / 2.0, 0.0, -1.0, 0.0));
  EXPECT_NEAR(g.c_fs(), 0.0, 1e-15);
  EXPECT_NEAR(g.a_fs(), 1.0, 1e-15);
  for (double eta : {0.0, 0.3, 1.0, 1.5}) EXPECT_NEAR(g.theta(eta), std::acos(std::sin(eta)), 1e-14);
  EXPECT_THROW(g.theta(2.0), WindowError);
}

TEST(FsGeodesic, ConstantsSatisfyUnitCircle) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto s = random_geodesic_spec(MetricKind::FubiniStudy, rng);
    const double v = std::hypot(s.theta_dot, std::sin(s.theta) * s.phi_dot);
    s.theta_dot /= v;
    s.phi_dot /= v;
    const auto g = fs_geodesic(s);
    ASSERT_NEAR(g.a_fs() * g.a_fs() + g.c_fs() * g.c_fs(), 1.0, 1e-14);
  }
}

TEST(FsGeodesic, MatchesRk4) {
  const auto spec = sphere_spec(pi / 3.0, 0.2, 0.0, 0.5);
  const auto g = fs_geodesic(spec);
  EXPECT_LE(sup_error_against(g, integrate_geodesic(spec, 1.2)), 1e-6);
}

TEST(FsGeodesic, PrincipalBranchJumpsAndUnwrappedIsContinuous) {
  const auto g = fs_geodesic(sphere_spec(pi / 2.0, 0.0, -0.8, 0.6));
  const double before = pi / 2.0 - 1e-6, after = pi / 2.0 + 1e-6;
  EXPECT_GT(std::abs(g.phi(after, BranchMode::Principal) - g.phi(before, BranchMode::Principal)), 3.0);
  EXPECT_LT(std::abs(g.phi(after, BranchMode::Unwrapped) - g.phi(before, BranchMode::Unwrapped)), 1e-5);
}

TEST(GreatCircle, Residuals) {
  const auto eq = fs_geodesic(sphere_spec(pi / 2.0, 0.0, 0.0, 1.0));
  const auto etas = grid(0.0, pi / 2.0 - 1e-3, 200);
  EXPECT_LE(great_circle_residual(eq, etas), 1e-15);
  const auto g = fs_geodesic(sphere_spec(pi / 2.0, 0.4, -0.8, 0.6));
  EXPECT_LE(great_circle_residual(g, etas), 1e-9);
  // a = sqrt((1 - c^2)/c^2) and a phase of phi_i + pi/2 for sin(phi - phi_bar) -> -cos.
  const double amp = std::sqrt((1 - 0.36) / 0.36);
  for (double eta : etas) {
    const double th = g.theta(eta), ph = g.phi(eta);
    ASSERT_NEAR(std::cos(th) / std::sin(th), amp * std::sin(ph - 0.4), 1e-9);
  }
}

TEST(GreatCircle, TiltedStarts) {
  Rng rng(2);
  const auto etas = grid(0.0, 3.0, 100);
  for (int i = 0; i < 50; ++i) {
    const auto g = fs_geodesic(random_geodesic_spec(MetricKind::FubiniStudy, rng));
    ASSERT_LE(great_circle_residual(g, etas), 1e-8);
  }
}

TEST(SjoqvistGeodesic, ConstantRadius) {
  const auto g = sjoqvist_geodesic({MetricKind::Sjoqvist, 0.1, 1.0, 0.0, 0.0, 0.3, 0.4});
  for (double eta : {0.0, 1.0, 5.0}) EXPECT_DOUBLE_EQ(g.radial().r(eta), 0.1);
}

TEST(SjoqvistGeodesic, RadialFromTheCentre) {
  const auto g = sjoqvist_geodesic({MetricKind::Sjoqvist, 0.0, 1.0, 0.0, 1.0, 0.3, 0.4});
  EXPECT_NEAR(g.radial().r(pi / 6.0), 0.5, 1e-15);
  EXPECT_NEAR(g.window_end(), pi / 2.0, 1e-15);
  EXPECT_THROW(g.position(2.0), WindowError);
}

TEST(SjoqvistGeodesic, InvalidRadialData) {
  EXPECT_THROW(SjoqvistRadial(1.0, 0.2), DomainError);
  EXPECT_THROW(SjoqvistRadial(1.2, 0.0), DomainError);
}

TEST(SjoqvistGeodesic, RadialMotionDecouples) {
  const GeodesicSpec a{MetricKind::Sjoqvist, 0.3, 1.0, 0.0, 0.2, 0.5, 0.4};
  GeodesicSpec b = a;
  b.theta = 2.0;
  b.phi_dot = -0.9;
  const auto ga = sjoqvist_geodesic(a), gb = sjoqvist_geodesic(b);
  for (double eta : {0.1, 0.7, 1.3}) EXPECT_EQ(ga.radial().r(eta), gb.radial().r(eta));
  const auto na = integrate_geodesic(a, 1.0), nb = integrate_geodesic(b, 1.0);
  ASSERT_EQ(na.eta.size(), nb.eta.size());
  for (std::size_t i = 0; i < na.eta.size(); ++i) ASSERT_NEAR(na.position[i][0], nb.position[i][0], 1e-10);
}

TEST(SjoqvistThetaCurve, BoundaryForm) {
  const auto c = sjoqvist_r_of_theta(0.2, 0.7, 1.5);
  EXPECT_NEAR(c.r(0.0), 0.2, 1e-15);
  EXPECT_NEAR(c.r(1.5), 0.7, 1e-15);
  const double d = std::asin(0.7) - std::asin(0.2);
  EXPECT_NEAR(c.c_s(), 1.5 / std::sqrt(1.5 * 1.5 + d * d), 1e-15);
  EXPECT_GE(c.c_s(), 0.0);
  EXPECT_LE(c.c_s(), 1.0);
  for (double th : grid(0.1, 1.4, 20)) {
    const double r = c.r(th), rp = c.r_prime(th);
    ASSERT_NEAR(rp * rp / (1 - r * r), c.beltrami_k(), 1e-12);
    ASSERT_LE(std::abs(sjoqvist_el_residual(c, th)), 1e-8);
  }
  EXPECT_THROW(sjoqvist_r_of_theta(0.0, 0.5, 1.0), DomainError);
  EXPECT_THROW(sjoqvist_r_of_theta(0.2, 0.5, 0.0), DomainError);
}

TEST(SjoqvistThetaCurve, AffineReparametrizationAgrees) {
  const double r_i = 0.3, r_dot = 0.25, th_i = 0.8, th_dot = 0.6;
  const auto g = sjoqvist_geodesic({MetricKind::Sjoqvist, r_i, th_i, 0.0, r_dot, th_dot, 0.0});
  const auto c = SjoqvistThetaCurve::from_initial(r_i, r_dot / th_dot, th_i);
  for (double eta : grid(0.0, 1.5, 30)) {
    const auto x = g.position(eta);
    ASSERT_NEAR(c.r(x[1]), x[0], 1e-9);
  }
}

TEST(BuresThetaCurve, InitialValueAndBeltrami) {
  const auto c = bures_r_of_theta(0.4, 0.3, 0.5);
  EXPECT_NEAR(c.r(0.5), 0.4, 1e-14);
  EXPECT_GT(c.a_b(), 1.0);
  const auto [lo, hi] = c.theta_window();
  for (double th : grid(lo + 0.05, hi - 0.05, 40)) {
    ASSERT_LE(c.r(th), 1.0);
    ASSERT_GE(c.r(th), c.c_b() - 1e-12);
    ASSERT_NEAR(c.beltrami(th), c.c_b(), 1e-8);
  }
  EXPECT_THROW(c.r(hi + 0.1), WindowError);
}

TEST(BuresThetaCurve, TurningPointLimit) {
  const auto c = bures_r_of_theta(0.4, 0.0, 0.0);
  EXPECT_NEAR(c.script_a(), pi / 2.0, 0.0);
  EXPECT_NEAR(c.r(0.0), 0.4, 1e-14);
  EXPECT_NEAR(c.r_prime(0.0), 0.0, 1e-14);
}

TEST(BuresEtaGeodesic, InitialConditionsAndConservation) {
  const double r_i = 0.45, th_i = 1.0, th_dot = 0.8, rp = 0.3;
  const auto g = bures_geodesic_eta(r_i, th_i, th_dot, rp);
  EXPECT_NEAR(g.theta(0.0), th_i, 1e-14);
  EXPECT_NEAR(g.theta_dot(0.0), th_dot, 1e-14);
  EXPECT_NEAR(g.r(0.0), r_i, 1e-14);
  EXPECT_NEAR(g.r_dot(0.0), rp * th_dot, 1e-14);
  const double v0 = speed(MetricKind::Bures, std::array{r_i, th_i, 0.0}, std::array{rp * th_dot, th_dot, 0.0});
  const double end = std::min(1.0, 0.99 * g.window_end());
  for (double eta : grid(0.0, end, 50)) {
    const auto x = g.position(eta);
    const auto v = g.velocity(eta);
    ASSERT_NEAR(x[0] * x[0] * v[1], r_i * r_i * th_dot, 1e-9);
    ASSERT_NEAR(speed(MetricKind::Bures, x, v), v0, 1e-9);
  }
}

TEST(BuresEtaGeodesic, AgreesWithThetaParametrization) {
  const auto g = bures_geodesic_eta(0.45, 1.0, 0.8, 0.3);
  const auto c = bures_r_of_theta(0.45, 0.3, 1.0);
  for (double eta : grid(0.0, std::min(1.5, 0.99 * g.window_end()), 30))
    ASSERT_NEAR(c.r(g.theta(eta)), g.r(eta), 1e-9);
}

TEST(BuresEtaGeodesic, RadialMotionDependsOnAngularRate) {
  const auto a = bures_geodesic_eta(0.45, 1.0, 0.8, 0.3);
  // Same dr/deta, different theta rate.
  const auto b = bures_geodesic_eta(0.45, 1.0, 0.4, 0.6);
  EXPECT_GT(std::abs(a.r(0.5) - b.r(0.5)), 1e-3);
}

TEST(BuresEtaGeodesic, PureRadialMotionHasNoClosedForm) {
  EXPECT_THROW(bures_geodesic_eta(0.4, 1.0, 0.0, 0.3), DomainError);
}

TEST(Integrator, ZeroVelocityIsConstant) {
  const GeodesicSpec s{MetricKind::Bures, 0.4, 1.0, 2.0, 0.0, 0.0, 0.0};
  const auto n = integrate_geodesic(s, 1.0);
  EXPECT_FALSE(n.boundary_event);
  for (const auto& x : n.position) {
    ASSERT_EQ(x[0], 0.4);
    ASSERT_EQ(x[1], 1.0);
    ASSERT_EQ(x[2], 2.0);
  }
}

TEST(Integrator, EquatorMatchesClosedForm) {
  const auto spec = sphere_spec(pi / 2.0, 0.0, 0.0, 1.0);
  EXPECT_LE(sup_error_against(fs_geodesic(spec), integrate_geodesic(spec, 3.0)), 1e-12);
}

TEST(Integrator, FourthOrderConvergence) {
  const auto spec = sphere_spec(pi / 3.0, 0.2, 0.3, 0.5);
  const auto g = fs_geodesic(spec);
  auto err = [&](double h) {
    StepControl ctl;
    ctl.step = h;
    ctl.local_tolerance = 1e9;
    return sup_error_against(g, integrate_geodesic(spec, 1.2, ctl));
  };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Integrator, ReportsBoundaryEvent) {
  const GeodesicSpec s{MetricKind::Sjoqvist, 0.5, 1.0, 0.0, 0.5, 0.2, 0.3};
  const auto n = integrate_geodesic(s, 5.0);
  ASSERT_TRUE(n.boundary_event.has_value());
  const double expect = sjoqvist_geodesic(s).radial().window_end();
  EXPECT_NEAR(*n.boundary_event, expect, 1e-3);
  EXPECT_LT(n.eta.back(), 5.0);
}

TEST(Integrator, RandomSpecsMatchClosedForms) {
  Rng rng(17);
  for (MetricKind k : {MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures, MetricKind::BlochSphere})
    for (int i = 0; i < 10; ++i) {
      const auto d = geodesic_oracle_deviation(random_geodesic_spec(k, rng), 2.0);
      ASSERT_LE(d.sup_norm, 1e-6) << to_string(k);
      ASSERT_GT(d.samples, 0u);
    }
}

TEST(Speed, Examples) {
  EXPECT_NEAR(speed(MetricKind::FubiniStudy, std::array{pi / 2.0, 0.0}, std::array{0.0, 1.0}), 0.5, 1e-15);
  EXPECT_EQ(speed(MetricKind::Bures, std::array{0.3, 1.0, 0.0}, std::array{0.0, 0.0, 0.0}), 0.0);
  EXPECT_THROW(speed(MetricKind::Bures, std::array{0.3, 1.0}, std::array{0.0, 0.0}), std::invalid_argument);
}

TEST(Conserved, DriftAlongClosedForms) {
  Rng rng(23);
  for (MetricKind k : {MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures})
    for (int i = 0; i < 20; ++i) ASSERT_LE(conserved_drift(random_geodesic_spec(k, rng), 2.0).max(), 1e-9);
}

TEST(Conserved, DriftAlongRk4) {
  const GeodesicSpec s{MetricKind::Sjoqvist, 0.3, 1.0, 0.0, 0.2, 0.5, 0.4};
  const auto n = integrate_geodesic(s, 1.0);
  const auto q0 = conserved_quantities(s.kind, std::span(n.position[0].data(), 3), std::span(n.velocity[0].data(), 3));
  for (std::size_t i = 0; i < n.eta.size(); ++i) {
    const auto q = conserved_quantities(s.kind, std::span(n.position[i].data(), 3), std::span(n.velocity[i].data(), 3));
    ASSERT_NEAR(q.speed, q0.speed, 1e-6);
    ASSERT_NEAR(q.angular, q0.angular, 1e-6);
    ASSERT_NEAR(q.radial, q0.radial, 1e-6);
  }
}
