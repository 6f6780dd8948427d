#include <gtest/gtest.h>

#include <array>

#include "qgeo/metrics.hpp"
#include "qgeo/oracles.hpp"

using namespace qgeo;

namespace {

constexpr std::array kinds{MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures,
                           MetricKind::BlochSphere};

double bures_analytic(const BlochPoint& p, const std::array<double, 3>& d) {
  return line_element(MetricKind::Bures, p, d);
}

}  // namespace

TEST(MetricTensor, DiagonalComponents) {
  const BlochPoint p(0.5, pi / 3.0, 1.0);
  const double s2 = 0.75;
  const auto fs = metric_tensor(MetricKind::FubiniStudy, p);
  EXPECT_EQ(fs.dim, 2);
  EXPECT_DOUBLE_EQ(fs.components[0][0], 0.25);
  EXPECT_NEAR(fs.components[1][1], 0.25 * s2, 1e-15);
  const auto bsm = metric_tensor(MetricKind::BlochSphere, p);
  EXPECT_DOUBLE_EQ(bsm.components[0][0], 1.0);
  EXPECT_NEAR(bsm.components[1][1], s2, 1e-15);
  const auto sj = metric_tensor(MetricKind::Sjoqvist, p);
  EXPECT_EQ(sj.dim, 3);
  EXPECT_NEAR(sj.components[0][0], 0.25 / 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(sj.components[1][1], 0.25);
  EXPECT_NEAR(sj.components[2][2], 0.25 * s2, 1e-15);
  const auto b = metric_tensor(MetricKind::Bures, p);
  EXPECT_NEAR(b.components[0][0], 0.25 / 0.75, 1e-15);
  EXPECT_NEAR(b.components[1][1], 0.0625, 1e-15);
  EXPECT_NEAR(b.components[2][2], 0.0625 * s2, 1e-15);
}

TEST(MetricTensor, RandomInteriorPointsArePositiveDiagonal) {
  Rng rng(21);
  for (MetricKind k : kinds)
    for (int i = 0; i < 10000; ++i) {
      const auto ev = metric_tensor(k, random_interior_point(k, rng));
      for (int a = 0; a < ev.dim; ++a) {
        ASSERT_GT(ev.components[a][a], 0.0);
        for (int b = 0; b < ev.dim; ++b)
          if (a != b) ASSERT_EQ(ev.components[a][b], 0.0);
      }
      ASSERT_GT(ev.determinant, 0.0);
      ASSERT_FALSE(ev.coordinate_singular);
      ASSERT_NEAR(ev.fisher_density * ev.fisher_density, ev.determinant, 1e-12 * ev.determinant);
    }
}

TEST(MetricTensor, PoleIsFlaggedNotThrown) {
  const auto ev = metric_tensor(MetricKind::FubiniStudy, {1.0, 0.0, 0.0});
  EXPECT_TRUE(ev.coordinate_singular);
  EXPECT_EQ(ev.determinant, 0.0);
}

TEST(MetricTensor, BoundaryRadiusIsADomainError) {
  EXPECT_THROW(metric_tensor(MetricKind::Sjoqvist, {1.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(metric_tensor(MetricKind::Bures, {1.0, 1.0, 0.0}), DomainError);
}

TEST(LineElement, Examples) {
  const BlochPoint p(0.4, pi / 2.0, 0.0);
  const std::array<double, 3> zero{0, 0, 0};
  for (MetricKind k : {MetricKind::Sjoqvist, MetricKind::Bures}) EXPECT_EQ(line_element(k, p, zero), 0.0);
  const std::array<double, 2> d{0.01, 0.02};
  EXPECT_NEAR(line_element(MetricKind::FubiniStudy, p, d), 1.25e-4, 1e-18);
  const std::array<double, 3> bad{1, 2, 3};
  EXPECT_THROW(line_element(MetricKind::FubiniStudy, p, bad), std::invalid_argument);
}

TEST(LineElement, SjoqvistAngularBlockIsFubiniStudy) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double th = uniform(rng, 0.1, pi - 0.1), ph = uniform(rng, 0.0, two_pi);
    const std::array<double, 2> d2{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const std::array<double, 3> d3{0.0, d2[0], d2[1]};
    const double fs = line_element(MetricKind::FubiniStudy, {1.0, th, ph}, d2);
    ASSERT_NEAR(line_element(MetricKind::Sjoqvist, {1.0 - 1e-9, th, ph}, d3), fs, 1e-12);
  }
}

TEST(OverlapCheck, Examples) {
  const auto a = PureState::from_angles(0.4, 0.1);
  EXPECT_NEAR(fs_overlap_check(a, a), 0.0, 1e-15);
  EXPECT_NEAR(fs_overlap_check(a, PureState::from_angles(pi - 0.4, 0.1 + pi)), 1.0, 1e-15);
}

TEST(OverlapCheck, SecondOrderAgreementWithMetric) {
  const double th = pi / 3.0, ph = 0.5, d = 1e-3;
  const double exact = fs_overlap_check(PureState::from_angles(th, ph), PureState::from_angles(th + d, ph + d));
  const std::array<double, 2> dx{d, d};
  // Metric at the midpoint, so the third-order term cancels.
  const double quad = line_element(MetricKind::FubiniStudy, {1.0, th + d / 2, ph + d / 2}, dx);
  EXPECT_NEAR(exact / quad, 1.0, 1e-5);
}

TEST(FisherRao, BlochEigenvalues) {
  const double r = 0.6;
  Eigen::VectorXd p(2);
  p << 0.5 * (1 + r), 0.5 * (1 - r);
  Eigen::MatrixXd j(2, 1);
  j << 0.5, -0.5;
  const double g = fisher_rao_discrete(p, j)(0, 0);
  EXPECT_NEAR(g, 1.0 / (1 - r * r), 1e-14);
  EXPECT_NEAR(0.25 * g, metric_tensor(MetricKind::Sjoqvist, {r, 1.0, 0.0}).components[0][0], 1e-14);
  EXPECT_NEAR(0.25 * g, metric_tensor(MetricKind::Bures, {r, 1.0, 0.0}).components[0][0], 1e-14);
}

TEST(FisherRao, UniformAndTwoPoint) {
  Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.25);
  EXPECT_EQ(fisher_rao_discrete(u, Eigen::MatrixXd::Zero(4, 2)).norm(), 0.0);
  const double xi = 0.3;
  Eigen::VectorXd p(2);
  p << xi, 1 - xi;
  Eigen::MatrixXd j(2, 1);
  j << 1, -1;
  EXPECT_NEAR(fisher_rao_discrete(p, j)(0, 0), 1.0 / (xi * (1 - xi)), 1e-12);
}

TEST(FisherRao, ZeroProbabilityIsRejected) {
  Eigen::VectorXd p(2);
  p << 1.0, 0.0;
  EXPECT_THROW(fisher_rao_discrete(p, Eigen::MatrixXd::Ones(2, 1)), DomainError);
}

TEST(SjoqvistDecomposition, PartsAndSum) {
  const BlochPoint p(0.5, pi / 3.0, 0.0);
  const std::array<double, 3> radial{0.3, 0, 0}, angular{0, 0.2, 0.4}, mixed{0.3, -0.2, 0.4};
  EXPECT_NEAR(sjoqvist_decomposition(p, radial).quantum, 0.0, 1e-16);
  EXPECT_NEAR(sjoqvist_decomposition(p, angular).classical, 0.0, 1e-16);
  const auto parts = sjoqvist_decomposition(p, mixed);
  EXPECT_NEAR(parts.classical + parts.quantum, line_element(MetricKind::Sjoqvist, p, mixed), 1e-12);
  EXPECT_NEAR(parts.classical, 0.09 / (4 * 0.75), 1e-15);
  EXPECT_NEAR(parts.quantum, (0.04 + 0.75 * 0.16) / 4, 1e-15);
}

TEST(SjoqvistDecomposition, RandomPartsAreNonnegativeAndAdditive) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_interior_point(MetricKind::Sjoqvist, rng);
    const std::array<double, 3> d{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const auto parts = sjoqvist_decomposition(p, d);
    ASSERT_GE(parts.classical, 0.0);
    ASSERT_GE(parts.quantum, -1e-16);
    ASSERT_NEAR(parts.classical + parts.quantum, line_element(MetricKind::Sjoqvist, p, d), 1e-12);
  }
}

TEST(BuresSpectral, ZeroAndRadialDisplacement) {
  const BlochPoint p(0.5, 1.0, 0.3);
  const std::array<double, 3> zero{0, 0, 0}, radial{0.2, 0, 0};
  EXPECT_EQ(bures_from_spectral(p, zero), 0.0);
  EXPECT_NEAR(bures_from_spectral(p, radial), 0.04 / (4 * 0.75), 1e-12);
}

TEST(BuresSpectral, AnalyticDifferentialMatchesClosedForm) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_interior_point(MetricKind::Bures, rng);
    const std::array<double, 3> d{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double exact = bures_analytic(p, d);
    ASSERT_NEAR(bures_spectral_sum(p, density_differential(p, d)), exact, 1e-12 * (1 + exact));
  }
}

TEST(BuresSpectral, GenericDisplacement) {
  const BlochPoint p(0.5, pi / 3.0, 1.0);
  const std::array<double, 3> d{0.3, -0.7, 0.5};
  const double exact = bures_analytic(p, d);
  EXPECT_NEAR(bures_from_spectral(p, d) / exact, 1.0, 1e-6);
}

TEST(BuresSpectral, ConvergesAtLeastQuadratically) {
  const BlochPoint p(0.5, pi / 3.0, 1.0);
  const std::array<double, 3> d{0.3, -0.7, 0.5};
  const double exact = bures_analytic(p, d);
  const double e1 = std::abs(bures_from_spectral(p, d, {1e-2, false}) - exact);
  const double e2 = std::abs(bures_from_spectral(p, d, {5e-3, false}) - exact);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(BuresSpectral, DegenerateSpectrumIsAnError) {
  const std::array<double, 3> d{0.1, 0, 0};
  EXPECT_THROW(bures_from_spectral({0.0, 1.0, 0.0}, d), DomainError);
}

TEST(Mcp, NamedFunctions) {
  EXPECT_DOUBLE_EQ(mcp_f(MCPFunction::Bures, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(mcp_f(MCPFunction::Sjoqvist, 1.0), 0.0);
  for (MCPFunction f : {MCPFunction::Bures, MCPFunction::Sjoqvist})
    for (double t = 0.01; t <= 100.0; t *= 1.1)
      ASSERT_NEAR(mcp_f(f, 1.0 / t), mcp_f(f, t) / t, 1e-12 * (1 + mcp_f(f, t) / t));
}

TEST(Mcp, BuresFunctionIsMonotoneOnAGrid) {
  // Ordinary monotonicity only; operator monotonicity is not certified.
  double last = 0.0;
  for (double t = 0.01; t <= 100.0; t *= 1.05) {
    ASSERT_GT(mcp_f(MCPFunction::Bures, t), last);
    last = mcp_f(MCPFunction::Bures, t);
  }
}

TEST(Mcp, ReproducesBothMetrics) {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_interior_point(MetricKind::Bures, rng);
    const std::array<double, 3> d{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double b = line_element(MetricKind::Bures, p, d);
    const double s = line_element(MetricKind::Sjoqvist, p, d);
    ASSERT_NEAR(mcp_metric(MCPFunction::Bures, p, d), b, 1e-12 * (1 + b));
    ASSERT_NEAR(mcp_metric(MCPFunction::Sjoqvist, p, d), s, 1e-12 * (1 + s));
  }
  const std::array<double, 3> ang{0, 0.3, 0.2};
  EXPECT_NEAR(mcp_metric(MCPFunction::Sjoqvist, {0.5, pi / 2, 0}, ang),
              line_element(MetricKind::Sjoqvist, {0.5, pi / 2, 0}, ang), 1e-12);
}

TEST(Mcp, SjoqvistConicalPoint) {
  const std::array<double, 3> d{0.1, 0.1, 0.1};
  EXPECT_THROW(mcp_metric(MCPFunction::Sjoqvist, {0.0, 1.0, 0.0}, d), DomainError);
  EXPECT_NO_THROW(mcp_metric(MCPFunction::Bures, {0.0, 1.0, 0.0}, d));
}
