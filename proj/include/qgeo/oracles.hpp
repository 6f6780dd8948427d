#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "qgeo/complexity.hpp"
#include "qgeo/curvature.hpp"
#include "qgeo/geodesics.hpp"

namespace qgeo {

/// Samplers and closed-form versus numerical cross-checks shared by the
/// verification command, the acceptance driver and the tests.

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  // Built from raw engine output so the stream is identical across standard libraries.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline double signed_uniform(Rng& rng, double lo, double hi) {
  const double m = uniform(rng, lo, hi);
  return (rng() & 1u) ? m : -m;
}

inline BlochPoint random_interior_point(MetricKind kind, Rng& rng) {
  const double r = has_radial_coordinate(kind) ? uniform(rng, 0.05, 0.95) : 1.0;
  const double th = uniform(rng, 0.2, pi - 0.2);
  const double ph = uniform(rng, 0.0, two_pi);
  return {r, th, ph};
}

/// Initial data away from the chart edges. Bures specs keep phi fixed so the
/// closed form applies.
inline GeodesicSpec random_geodesic_spec(MetricKind kind, Rng& rng) {
  GeodesicSpec s;
  s.kind = kind;
  s.theta = uniform(rng, 0.5, pi - 0.5);
  s.phi = uniform(rng, 0.0, two_pi);
  s.theta_dot = signed_uniform(rng, 0.0, 1.0);
  switch (kind) {
    case MetricKind::FubiniStudy:
    case MetricKind::BlochSphere:
      s.phi_dot = signed_uniform(rng, 0.3, 1.0);
      break;
    case MetricKind::Sjoqvist:
      s.r = uniform(rng, 0.1, 0.9);
      s.r_dot = signed_uniform(rng, 0.0, 0.5);
      s.phi_dot = signed_uniform(rng, 0.3, 1.0);
      break;
    case MetricKind::Bures:
      s.r = uniform(rng, 0.2, 0.8);
      s.r_dot = signed_uniform(rng, 0.0, 0.3);
      s.theta_dot = signed_uniform(rng, 0.3, 1.0);
      s.phi_dot = 0.0;
      break;
  }
  return s;
}

/// Closed-form geodesic for the spec. Bures needs phi_dot = 0 and theta_dot != 0.
inline GeodesicCurve closed_form_geodesic(const GeodesicSpec& spec) {
  switch (spec.kind) {
    case MetricKind::FubiniStudy:
    case MetricKind::BlochSphere:
      return fs_geodesic(spec);
    case MetricKind::Sjoqvist:
      return sjoqvist_geodesic(spec);
    case MetricKind::Bures:
      detail::validate_spec(spec);
      if (spec.phi_dot != 0.0) throw DomainError("Bures closed form needs phi_dot = 0");
      if (spec.theta_dot == 0.0) throw DomainError("Bures closed form needs theta_dot != 0");
      return BuresEtaGeodesic(spec.r, spec.theta, spec.theta_dot, spec.r_dot / spec.theta_dot, spec.phi);
  }
  throw std::invalid_argument("unknown metric kind");
}

/// Position and velocity of a closed-form curve padded to three slots, with
/// continued angles so they can be compared against an integrated trajectory.
inline std::pair<Vec<3>, Vec<3>> closed_form_state(const GeodesicCurve& curve, double eta) {
  return std::visit(
      detail::overloaded{
          [&](const GreatCircleGeodesic& g) {
            const auto x = g.position(eta);
            const auto v = g.velocity(eta);
            return std::pair<Vec<3>, Vec<3>>{{x[0], x[1], 0.0}, {v[0], v[1], 0.0}};
          },
          [&](const SjoqvistGeodesic& g) { return std::pair{g.position(eta), g.velocity(eta)}; },
          [&](const BuresEtaGeodesic& g) { return std::pair{g.position(eta), g.velocity(eta)}; },
          [&](const auto&) -> std::pair<Vec<3>, Vec<3>> {
            throw std::invalid_argument("curve has no affine closed form");
          }},
      curve);
}

struct OracleDeviation {
  double sup_norm = 0.0;        ///< max |x_closed - x_rk4| over compared samples
  double compared_until = 0.0;  ///< last eta compared
  std::size_t samples = 0;
};

/// RK4 integration of the geodesic equation against the closed form, over
/// [0, min(eta_max, window end, boundary event)].
inline OracleDeviation geodesic_oracle_deviation(const GeodesicSpec& spec, double eta_max,
                                                 StepControl ctl = {}) {
  const GeodesicCurve curve = closed_form_geodesic(spec);
  const double end = std::min(eta_max, detail::closed_form_window_end(curve));
  const NumericGeodesic num = integrate_geodesic(spec, end, ctl);
  OracleDeviation d;
  for (std::size_t i = 0; i < num.eta.size(); ++i) {
    const double eta = num.eta[i];
    if (eta >= end) break;
    const Vec<3> x = closed_form_state(curve, eta).first;
    for (int k = 0; k < num.dim; ++k) d.sup_norm = std::max(d.sup_norm, std::abs(x[k] - num.position[i][k]));
    d.compared_until = eta;
    ++d.samples;
  }
  return d;
}

struct ConservedDrift {
  double speed = 0.0;
  double angular = 0.0;
  double radial = 0.0;
  double max() const { return std::max({speed, angular, radial}); }
};

/// Max deviation of the conserved quantities from their initial values at
/// n + 1 evenly spaced points of [0, min(eta_max, window)).
inline ConservedDrift conserved_drift(const GeodesicSpec& spec, double eta_max, int n = 200) {
  const GeodesicCurve curve = closed_form_geodesic(spec);
  // Stop short of the window edge, where the rates of r or theta diverge.
  const double end = std::min(eta_max, 0.99 * detail::closed_form_window_end(curve));
  const int dim = dimension(spec.kind);
  auto at = [&](double eta) {
    const auto [x, v] = closed_form_state(curve, eta);
    return conserved_quantities(spec.kind, std::span<const double>(x.data(), dim),
                                std::span<const double>(v.data(), dim));
  };
  const ConservedQuantities q0 = at(0.0);
  ConservedDrift d;
  for (int i = 1; i <= n; ++i) {
    const ConservedQuantities q = at(end * i / n);
    d.speed = std::max(d.speed, std::abs(q.speed - q0.speed));
    d.angular = std::max(d.angular, std::abs(q.angular - q0.angular));
    d.radial = std::max(d.radial, std::abs(q.radial - q0.radial));
  }
  return d;
}

/// Expected constant scalar curvature (8 for both sphere-type charts of the
/// qubit at Fubini-Study scale, 24 for Bures) and the constant sectional value.
inline double expected_scalar_curvature(MetricKind kind) {
  switch (kind) {
    case MetricKind::FubiniStudy: return 8.0;
    case MetricKind::Sjoqvist: return 8.0;
    case MetricKind::Bures: return 24.0;
    case MetricKind::BlochSphere: return 2.0;
  }
  return 0.0;
}

inline double expected_sectional(MetricKind kind, FrameAxis a, FrameAxis b) {
  if (kind == MetricKind::BlochSphere) return 1.0;
  if (kind == MetricKind::Sjoqvist && (a == FrameAxis::R || b == FrameAxis::R)) return 0.0;
  return 4.0;
}

/// |value - expected| relative to max(1, |expected|).
inline double curvature_deviation(double value, double expected) {
  return std::abs(value - expected) / std::max(1.0, std::abs(expected));
}

}  // namespace qgeo
