#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "qgeo/geodesics.hpp"
#include "qgeo/quadrature.hpp"

namespace qgeo {

// ---------------------------------------------------------------- lengths

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void require_kind(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

/// Trapezoid rule of f(sample index) over numeric samples up to eta_f.
template <class F>
double trapezoid_samples(const NumericGeodesic& c, double eta_f, F f) {
  if (c.eta.empty() || eta_f > c.eta.back() + 1e-12)
    throw WindowError("eta_f beyond the integrated trajectory");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < c.eta.size() && c.eta[i] < eta_f; ++i) {
    const double e1 = std::min(c.eta[i + 1], eta_f);
    const double w = (e1 - c.eta[i]) / (c.eta[i + 1] - c.eta[i]);
    const double f1 = f(i) + w * (f(i + 1) - f(i));
    sum += 0.5 * (f(i) + f1) * (e1 - c.eta[i]);
  }
  return sum;
}

inline double numeric_speed(const NumericGeodesic& c, std::size_t i) {
  return speed(c.kind, std::span<const double>(c.position[i].data(), c.dim),
               std::span<const double>(c.velocity[i].data(), c.dim));
}

/// Speed of a closed-form curve; all of them have constant speed.
inline double closed_form_speed(MetricKind kind, const GeodesicCurve& curve) {
  return std::visit(
      overloaded{
          [&](const GreatCircleGeodesic& g) {
            require_kind(!has_radial_coordinate(kind), "great circle needs a sphere metric");
            const Vec<2> x{g.theta_i(), g.phi_i()}, v{g.theta_dot_i(), g.phi_dot_i()};
            return speed(kind, x, v);
          },
          [&](const SjoqvistGeodesic& g) {
            require_kind(kind == MetricKind::Sjoqvist, "curve is a Sjoqvist geodesic");
            const double w = g.radial().omega();
            const double ang = g.angular().rate();
            return 0.5 * std::sqrt(w * w + ang * ang);
          },
          [&](const BuresEtaGeodesic& g) {
            require_kind(kind == MetricKind::Bures, "curve is a Bures geodesic");
            const Vec<3> x = g.position(0.0), v = g.velocity(0.0);
            return speed(kind, x, v);
          },
          [&](const BuresThetaCurve&) -> double {
            throw std::invalid_argument("theta-parametrized curve carries no affine speed");
          },
          [&](const NumericGeodesic& n) { return numeric_speed(n, 0); }},
      curve);
}

inline double closed_form_window_end(const GeodesicCurve& curve) {
  return std::visit(overloaded{[](const GreatCircleGeodesic& g) { return g.window_end(); },
                               [](const SjoqvistGeodesic& g) { return g.window_end(); },
                               [](const BuresEtaGeodesic& g) { return g.window_end(); },
                               [](const BuresThetaCurve&) { return infinity; },
                               [](const NumericGeodesic& n) {
                                 return n.eta.empty() ? 0.0 : n.eta.back();
                               }},
                    curve);
}

}  // namespace detail

/// Length of the curve on [0, eta_f]: speed * eta_f for closed forms, a
/// trapezoid sum over samples for integrated trajectories.
inline double path_length(MetricKind kind, const GeodesicCurve& curve, double eta_f) {
  if (eta_f < 0.0) throw std::invalid_argument("eta_f must be nonnegative");
  if (const auto* n = std::get_if<NumericGeodesic>(&curve))
    return detail::trapezoid_samples(*n, eta_f, [&](std::size_t i) { return detail::numeric_speed(*n, i); });
  if (eta_f > detail::closed_form_window_end(curve)) throw WindowError("eta_f beyond the curve window");
  return detail::closed_form_speed(kind, curve) * eta_f;
}

/// (m/2) * integral of g(xi_dot, xi_dot) over [0, eta_f].
inline double action(MetricKind kind, const GeodesicCurve& curve, double mass, double eta_f) {
  if (eta_f < 0.0) throw std::invalid_argument("eta_f must be nonnegative");
  if (const auto* n = std::get_if<NumericGeodesic>(&curve))
    return 0.5 * mass * detail::trapezoid_samples(*n, eta_f, [&](std::size_t i) {
             const double v = detail::numeric_speed(*n, i);
             return v * v;
           });
  if (eta_f > detail::closed_form_window_end(curve)) throw WindowError("eta_f beyond the curve window");
  const double v = detail::closed_form_speed(kind, curve);
  return 0.5 * mass * v * v * eta_f;
}

/// Half the polar-angle sweep.
inline double fs_length(double theta_f) { return 0.5 * theta_f; }

inline double sjoqvist_length(double r_i, double r_f, double theta_f) {
  for (double r : {r_i, r_f})
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("radii must lie in [0, 1]");
  const double d = std::asin(r_f) - std::asin(r_i);
  return 0.5 * std::sqrt(theta_f * theta_f + d * d);
}

/// Sjoqvist length at fixed phi for initial data (r_i, r'_i = dr/dtheta, theta_dot_i).
inline double sjoqvist_length_eta(double r_i, double r_prime_i, double theta_dot_i, double eta_f) {
  if (!(r_i >= 0.0 && r_i < 1.0)) throw DomainError("r_i must lie in [0, 1)");
  return 0.5 * std::sqrt(1.0 + r_prime_i * r_prime_i / ((1.0 - r_i) * (1.0 + r_i))) *
         std::abs(theta_dot_i) * eta_f;
}

inline double bures_length(double r_i, double r_prime_i, double theta_dot_i, double eta_f) {
  if (!(r_i >= 0.0 && r_i < 1.0)) throw DomainError("r_i must lie in [0, 1)");
  return 0.5 * std::sqrt(r_i * r_i + r_prime_i * r_prime_i / ((1.0 - r_i) * (1.0 + r_i))) *
         std::abs(theta_dot_i) * eta_f;
}

// ---------------------------------------------------------------- volumes

inline double accessible_volume(MetricKind kind) {
  switch (kind) {
    case MetricKind::FubiniStudy: return pi;
    case MetricKind::BlochSphere: return 4.0 * pi;
    case MetricKind::Sjoqvist: return pi * pi / 4.0;
    case MetricKind::Bures: return pi * pi / 8.0;
  }
  throw std::invalid_argument("unknown metric kind");
}

/// The same volumes by quadrature of the factorized Fisher density.
inline double accessible_volume_quadrature(MetricKind kind) {
  const double scale = kind == MetricKind::BlochSphere ? 1.0 : 0.25;
  const double angular = integrate([&](double t) { return scale * std::sin(t); }, 0.0, pi) * two_pi;
  if (!has_radial_coordinate(kind)) return angular;
  // The rule hands over the distance to the nearer endpoint, which gives 1 - r
  // without cancellation next to the r = 1 singularity.
  auto gap = [](double r, double rc) { return r > 0.5 ? rc : 1.0 - r; };
  const double radial =
      kind == MetricKind::Sjoqvist
          ? integrate_singular([&](double r, double rc) { return 0.5 / std::sqrt(gap(r, rc) * (1.0 + r)); },
                               0.0, 1.0)
          : integrate_singular(
                [&](double r, double rc) { return 0.5 * r * r / std::sqrt(gap(r, rc) * (1.0 + r)); }, 0.0, 1.0);
  return radial * angular;
}

/// Signed product of swept-interval factors. `value` carries the orientation
/// correction (product of the signs of the initial rates), so it is the
/// modulus whenever every coordinate moves monotonically.
struct ExploredVolume {
  double value = 0.0;
  double magnitude = 0.0;
  int orientation = 1;
  /// Swept coordinate intervals (start, end) in chart order.
  std::vector<std::pair<double, double>> domain;
};

namespace detail {

inline double theta_antiderivative(MetricKind kind, double theta) {
  return -(kind == MetricKind::BlochSphere ? 1.0 : 0.25) * std::cos(theta);
}

/// Antiderivative of the radial density in the angle alpha, r = sin(alpha).
inline double radial_antiderivative(MetricKind kind, double alpha) {
  if (kind == MetricKind::Sjoqvist) return 0.5 * alpha;
  return 0.25 * (alpha - std::sin(alpha) * std::cos(alpha));
}

inline ExploredVolume finish(std::vector<double> factors, std::vector<int> signs,
                             std::vector<std::pair<double, double>> domain) {
  ExploredVolume v;
  double prod = 1.0;
  for (double f : factors) prod *= f;
  for (int s : signs) v.orientation *= s;
  v.value = v.orientation * prod;
  v.magnitude = std::abs(prod);
  v.domain = std::move(domain);
  return v;
}

inline std::pair<double, int> angular_factors(MetricKind kind, const GreatCircleGeodesic& g, double eta,
                                              BranchMode mode, double& th, double& ph) {
  th = g.theta(eta, WindowPolicy::Continue);
  ph = g.phi(eta, mode, WindowPolicy::Continue);
  const double ft = theta_antiderivative(kind, th) - theta_antiderivative(kind, g.theta_i());
  const double fp = ph - g.phi_i();
  return {ft * fp, sign_or_one(g.theta_dot_i()) * sign_or_one(g.phi_dot_i())};
}

}  // namespace detail

/// Explored volume at eta. Closed forms are evaluated with continued
/// coordinates when policy is Continue; Enforce rejects eta past the window.
inline ExploredVolume explored_volume(MetricKind kind, const GeodesicCurve& curve, double eta,
                                      BranchMode mode = BranchMode::Principal,
                                      WindowPolicy policy = WindowPolicy::Enforce) {
  if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
  return std::visit(
      detail::overloaded{
          [&](const GreatCircleGeodesic& g) {
            detail::require_kind(!has_radial_coordinate(kind), "great circle needs a sphere metric");
            detail::check_window(eta, g.window_end(), policy);
            double th, ph;
            const auto [prod, sgn] = detail::angular_factors(kind, g, eta, mode, th, ph);
            return detail::finish({prod}, {sgn}, {{g.theta_i(), th}, {g.phi_i(), ph}});
          },
          [&](const SjoqvistGeodesic& g) {
            detail::require_kind(kind == MetricKind::Sjoqvist, "curve is a Sjoqvist geodesic");
            detail::check_window(eta, g.window_end(), policy);
            double th, ph;
            const auto [prod, sgn] =
                detail::angular_factors(MetricKind::FubiniStudy, g.angular(), eta, mode, th, ph);
            const auto& rad = g.radial();
            const double fr = detail::radial_antiderivative(kind, rad.alpha(eta)) -
                              detail::radial_antiderivative(kind, rad.alpha_i());
            return detail::finish({fr, prod}, {sign_or_one(rad.r_dot_i()), sgn},
                                  {{rad.r_i(), std::sin(rad.alpha(eta))},
                                   {g.angular().theta_i(), th},
                                   {g.angular().phi_i(), ph}});
          },
          [&](const BuresEtaGeodesic& g) {
            // phi is constant, so the three-dimensional sweep is degenerate.
            detail::require_kind(kind == MetricKind::Bures, "curve is a Bures geodesic");
            detail::check_window(eta, g.window_end(), policy);
            const double th = g.theta(eta, mode, WindowPolicy::Continue);
            return detail::finish({0.0}, {1},
                                  {{g.r_i(), std::sin(g.alpha(eta))}, {g.theta_i(), th}, {g.phi(), g.phi()}});
          },
          [&](const BuresThetaCurve&) -> ExploredVolume {
            throw std::invalid_argument("explored volume needs an affinely parametrized curve");
          },
          [&](const NumericGeodesic& n) {
            if (n.eta.empty() || eta > n.eta.back() + 1e-12)
              throw WindowError("eta beyond the integrated trajectory");
            const auto it = std::lower_bound(n.eta.begin(), n.eta.end(), eta - 1e-12);
            const std::size_t i = static_cast<std::size_t>(it - n.eta.begin());
            const Vec<3>& x0 = n.position.front();
            const Vec<3>& x1 = n.position[i];
            const Vec<3>& v0 = n.velocity.front();
            std::vector<double> f;
            std::vector<int> s;
            std::vector<std::pair<double, double>> dom;
            int t_idx = 0;
            if (n.dim == 3) {
              f.push_back(detail::radial_antiderivative(kind, std::asin(x1[0])) -
                          detail::radial_antiderivative(kind, std::asin(x0[0])));
              s.push_back(sign_or_one(v0[0]));
              dom.push_back({x0[0], x1[0]});
              t_idx = 1;
            }
            f.push_back(detail::theta_antiderivative(kind, x1[t_idx]) -
                        detail::theta_antiderivative(kind, x0[t_idx]));
            f.push_back(x1[t_idx + 1] - x0[t_idx + 1]);
            s.push_back(sign_or_one(v0[t_idx]));
            s.push_back(sign_or_one(v0[t_idx + 1]));
            dom.push_back({x0[t_idx], x1[t_idx]});
            dom.push_back({x0[t_idx + 1], x1[t_idx + 1]});
            return detail::finish(std::move(f), std::move(s), std::move(dom));
          }},
      curve);
}

/// Real form of the antiderivative of sin(eta) arctan(c tan eta) on the
/// principal branch: (c/a) artanh(a sin tau) - cos(tau) arctan(c tan tau),
/// a = sqrt(1 - c^2).
inline double i_v_fs(double tau, double c_fs) {
  if (std::abs(c_fs) > 1.0) throw DomainError("|c_FS| must not exceed 1");
  const double a = std::sqrt((1.0 - c_fs) * (1.0 + c_fs));
  double first = 0.0;
  if (c_fs != 0.0) first = a > 0.0 ? (c_fs / a) * std::atanh(a * std::sin(tau)) : c_fs * std::sin(tau);
  return first - std::cos(tau) * arctan_k_tan(c_fs, tau);
}

/// Integral of i_v_fs from 0 to tau. The integrand is antiperiodic with
/// period pi, so the result has period 2 pi.
inline double i_v_fs_integral(double tau, double c_fs) {
  const double t = std::fmod(tau, two_pi);
  std::vector<double> breaks{pi / 2.0, 3.0 * pi / 2.0};
  return integrate_piecewise([&](double s) { return i_v_fs(s, c_fs); }, 0.0, t, breaks, 1e-12);
}

/// Explored-volume complexity of the Fubini-Study equatorial-start geodesic at unit rate.
inline double igc_fs_closed(double c_fs, double tau) {
  const double a = std::sqrt((1.0 - c_fs) * (1.0 + c_fs));
  return 0.25 * a * i_v_fs(tau, c_fs) / tau;
}

/// Sjoqvist counterpart with radial frequency omega, including the
/// integration-by-parts remainder.
inline double igc_sjoqvist_closed(double c_fs, double omega, double tau) {
  const double a = std::sqrt((1.0 - c_fs) * (1.0 + c_fs));
  return a * omega / 8.0 * (i_v_fs(tau, c_fs) - i_v_fs_integral(tau, c_fs) / tau);
}

/// Leading large-tau term of igc_sjoqvist_closed.
inline double igc_sjoqvist_asymptotic(double c_fs, double omega, double tau) {
  const double a = std::sqrt((1.0 - c_fs) * (1.0 + c_fs));
  return a * omega / 8.0 * i_v_fs(tau, c_fs);
}

namespace detail {

/// Parameters where the principal-branch explored volume jumps.
inline std::vector<double> volume_breakpoints(const GeodesicCurve& curve, double tau) {
  std::vector<double> out;
  auto add = [&](double u0, double rate) {
    if (rate == 0.0) return;
    // eta with u0 + rate * eta = pi/2 + m pi.
    const double lo = std::min(u0, u0 + rate * tau), hi = std::max(u0, u0 + rate * tau);
    for (double m = std::ceil((lo - pi / 2.0) / pi); pi / 2.0 + m * pi <= hi; m += 1.0)
      out.push_back((pi / 2.0 + m * pi - u0) / rate);
  };
  if (const auto* g = std::get_if<GreatCircleGeodesic>(&curve)) add(g->phase(), g->rate());
  if (const auto* g = std::get_if<SjoqvistGeodesic>(&curve))
    add(g->angular().phase(), g->angular().rate());
  if (const auto* g = std::get_if<BuresEtaGeodesic>(&curve)) add(g->b(), -g->kappa());
  return out;
}

}  // namespace detail

/// Time-averaged explored volume (1/tau) * integral_0^tau V(eta) d eta.
inline double igc(MetricKind kind, const GeodesicCurve& curve, double tau,
                  BranchMode mode = BranchMode::Principal,
                  WindowPolicy policy = WindowPolicy::Enforce) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (const auto* n = std::get_if<NumericGeodesic>(&curve)) {
    return detail::trapezoid_samples(*n, tau, [&](std::size_t i) {
             return explored_volume(kind, curve, n->eta[i], mode).value;
           }) / tau;
  }
  if (policy == WindowPolicy::Enforce && tau > detail::closed_form_window_end(curve))
    throw WindowError("tau beyond the curve window");
  const auto breaks = detail::volume_breakpoints(curve, tau);
  const double integral = integrate_piecewise(
      [&](double eta) { return explored_volume(kind, curve, eta, mode, WindowPolicy::Continue).value; },
      0.0, tau, breaks, 1e-13);
  return integral / tau;
}

/// log of igc; empty when the averaged volume is not positive.
inline std::optional<double> ige(MetricKind kind, const GeodesicCurve& curve, double tau,
                                 BranchMode mode = BranchMode::Principal,
                                 WindowPolicy policy = WindowPolicy::Enforce) {
  const double c = igc(kind, curve, tau, mode, policy);
  if (!(c > 0.0)) return std::nullopt;
  return std::log(c);
}

struct ComplexityTrace {
  std::vector<double> tau;
  std::vector<double> volume;
  std::vector<double> complexity;
  std::vector<std::optional<double>> entropy;
};

/// Samples V, C and S on an increasing grid, accumulating the running integral.
inline ComplexityTrace complexity_trace(MetricKind kind, const GeodesicCurve& curve,
                                        std::span<const double> grid,
                                        BranchMode mode = BranchMode::Principal,
                                        WindowPolicy policy = WindowPolicy::Continue) {
  ComplexityTrace t;
  double prev = 0.0, running = 0.0;
  for (double tau : grid) {
    if (!(tau > prev)) throw std::invalid_argument("grid must be positive and increasing");
    if (policy == WindowPolicy::Enforce && tau > detail::closed_form_window_end(curve))
      throw WindowError("grid extends past the curve window");
    const auto breaks = detail::volume_breakpoints(curve, tau);
    running += integrate_piecewise(
        [&](double eta) { return explored_volume(kind, curve, eta, mode, WindowPolicy::Continue).value; },
        prev, tau, breaks, 1e-13);
    prev = tau;
    const double c = running / tau;
    t.tau.push_back(tau);
    t.volume.push_back(explored_volume(kind, curve, tau, mode, WindowPolicy::Continue).value);
    t.complexity.push_back(c);
    t.entropy.push_back(c > 0.0 ? std::optional<double>(std::log(c)) : std::nullopt);
  }
  return t;
}

// ------------------------------------------------------ asymptotic laws

/// Matched initial data for the pure/mixed comparison: both curves start on
/// the equator at unit angular rate with theta_dot_i = -sqrt(1 - c^2); the
/// Sjoqvist curve adds radial data (r_i, r_dot_i).
struct ComplexityParams {
  double r_i = 0.0;
  double r_dot_i = 0.5;
  double c_fs = 0.6;
  double phi_i = 0.0;

  double a_fs() const { return std::sqrt((1.0 - c_fs) * (1.0 + c_fs)); }
  double omega() const { return r_dot_i / std::sqrt((1.0 - r_i) * (1.0 + r_i)); }

  GeodesicSpec fs_spec() const {
    return {MetricKind::FubiniStudy, 1.0, pi / 2.0, phi_i, 0.0, -a_fs(), c_fs};
  }
  GeodesicSpec sjoqvist_spec() const {
    return {MetricKind::Sjoqvist, r_i, pi / 2.0, phi_i, r_dot_i, -a_fs(), c_fs};
  }
};

struct AsymptoticLaw {
  std::vector<double> tau;
  /// [C_Sj / C_FS] / tau with the leading-order Sjoqvist form.
  std::vector<double> ratio_over_tau;
  double ratio_limit = 0.0;      ///< omega / 2
  double ratio_spread = 0.0;     ///< max - min of ratio_over_tau
  double ratio_max_error = 0.0;  ///< max |ratio_over_tau - ratio_limit|
  /// Least-squares slope of ln C_Sj - ln C_FS against ln tau in the fit window,
  /// with the full Sjoqvist complexity (remainder included).
  double ige_gap_slope = 0.0;
  double ige_gap_intercept = 0.0;
  /// Same fit with the leading-order Sjoqvist form.
  double ige_gap_slope_leading = 0.0;
  /// Fit of ln(mean|C_Sj|) - ln(mean|C_FS|), means taken over one period
  /// [tau, tau + 2 pi] with the full Sjoqvist form. Unlike the pointwise fit
  /// it is insensitive to the zero crossings of the oscillating complexities.
  double ige_gap_slope_averaged = 0.0;
  std::size_t fit_points = 0;
  std::size_t dropped_points = 0;
  /// Ratio of period-averaged |dC/dtau| (Sjoqvist over Fubini-Study), divided
  /// by tau, at the start and end of the fit window.
  double rate_ratio_over_tau_start = 0.0;
  double rate_ratio_over_tau_end = 0.0;
};

namespace detail {

inline std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

inline double mean_abs_complexity_ratio(const ComplexityParams& p, double tau0) {
  const int n = 32;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = tau0 + two_pi * (i + 0.5) / n;
    num += std::abs(igc_sjoqvist_closed(p.c_fs, p.omega(), t));
    den += std::abs(igc_fs_closed(p.c_fs, t));
  }
  return num / den;
}

inline double mean_abs_rate_ratio(const ComplexityParams& p, double tau0) {
  const double a = p.a_fs(), w = p.omega(), c = p.c_fs;
  const int n = 400;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = tau0 + two_pi * i / n;
    const double I = i_v_fs(t, c), dI = std::sin(t) * arctan_k_tan(c, t);
    const double J = i_v_fs_integral(t, c);
    const double d_fs = 0.25 * a * (dI * t - I) / (t * t);
    const double d_sj = a * w / 8.0 * (dI - I / t + J / (t * t));
    const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
    num += wgt * std::abs(d_sj);
    den += wgt * std::abs(d_fs);
  }
  return num / den;
}

}  // namespace detail

inline AsymptoticLaw asymptotic_ratio(const ComplexityParams& p, std::span<const double> grid,
                                      double fit_lo = 1e2, double fit_hi = 1e4) {
  if (p.r_dot_i == 0.0) throw DomainError("zero radial rate: the Sjoqvist volume vanishes");
  if (!(std::abs(p.c_fs) < 1.0)) throw DomainError("need |c_FS| < 1 for a nonzero FS volume");
  AsymptoticLaw law;
  law.ratio_limit = 0.5 * p.omega();
  const double w = p.omega();
  double rmin = infinity, rmax = -infinity;
  std::vector<double> x, y, y_lead, x_avg, y_avg;
  double prev = 0.0;
  for (double tau : grid) {
    if (!(tau > prev)) throw std::invalid_argument("grid must be positive and increasing");
    prev = tau;
    const double c_fs = igc_fs_closed(p.c_fs, tau);
    const double c_lead = igc_sjoqvist_asymptotic(p.c_fs, w, tau);
    law.tau.push_back(tau);
    const double r = c_lead / c_fs / tau;
    law.ratio_over_tau.push_back(r);
    if (std::isfinite(r)) {
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      law.ratio_max_error = std::max(law.ratio_max_error, std::abs(r - law.ratio_limit));
    }
    if (tau < fit_lo || tau > fit_hi) continue;
    x_avg.push_back(std::log(tau));
    y_avg.push_back(std::log(detail::mean_abs_complexity_ratio(p, tau)));
    const double c_full = igc_sjoqvist_closed(p.c_fs, w, tau);
    if (c_fs > 0.0 && c_full > 0.0 && c_lead > 0.0) {
      x.push_back(std::log(tau));
      y.push_back(std::log(c_full) - std::log(c_fs));
      y_lead.push_back(std::log(c_lead) - std::log(c_fs));
    } else {
      ++law.dropped_points;
    }
  }
  law.ratio_spread = rmax - rmin;
  law.fit_points = x.size();
  if (x.size() >= 2) {
    std::tie(law.ige_gap_slope, law.ige_gap_intercept) = detail::least_squares(x, y);
    law.ige_gap_slope_leading = detail::least_squares(x, y_lead).first;
  }
  if (x_avg.size() >= 2) {
    law.ige_gap_slope_averaged = detail::least_squares(x_avg, y_avg).first;
  }
  law.rate_ratio_over_tau_start = detail::mean_abs_rate_ratio(p, fit_lo) / fit_lo;
  law.rate_ratio_over_tau_end = detail::mean_abs_rate_ratio(p, fit_hi) / fit_hi;
  return law;
}

// ------------------------------------------------------ ordering reports

/// Initial data shared by the orderings. compare: equatorial great circle with
/// c_fs plus radial (r_i, r_dot_i). Slices (phi fixed): (r_i, r_dot_i,
/// theta_i, theta_dot_i) for both Sjoqvist and Bures.
struct ComparisonParams {
  double r_i = 0.3;
  double r_dot_i = 0.4;
  double c_fs = 0.6;
  double theta_i = 1.0;
  double theta_dot_i = 1.0;
};

struct OrderingSample {
  double eta;
  double lhs;  ///< the side asserted to be larger
  double rhs;
  bool holds;
};

struct OrderingSeries {
  std::vector<OrderingSample> samples;
  /// Smallest grid eta from which the ordering holds on the rest of the grid.
  std::optional<double> eta_star;
};

struct OrderingReport {
  OrderingSeries compare;  ///< V_Sj/V_Sj^acc >= V_FS/V_FS^acc
  OrderingSeries boys;     ///< V_Sj,slice/V_Sj^acc >= V_B,slice/V_B^acc
};

/// Explored volume of the phi-fixed Sjoqvist slice: radial sweep in alpha
/// times the in-plane polar sweep theta_dot_i * eta, each with density 1/2.
inline double sjoqvist_slice_volume(const ComparisonParams& p, double eta) {
  const SjoqvistRadial rad(p.r_i, p.r_dot_i);
  const double fr = 0.5 * (rad.alpha(eta) - rad.alpha_i());
  const double ft = 0.5 * p.theta_dot_i * eta;
  return sign_or_one(p.r_dot_i) * sign_or_one(p.theta_dot_i) * fr * ft;
}

/// Bures phi-fixed slice with density r/(4 sqrt(1-r^2)), using the radial
/// angle continued through the r = 1 touch points and the unwrapped theta.
inline double bures_slice_volume(const ComparisonParams& p, double eta) {
  const BuresEtaGeodesic g(p.r_i, p.theta_i, p.theta_dot_i, p.r_dot_i / p.theta_dot_i);
  const double alpha_i = std::asin(p.r_i);
  const double fr = 0.5 * (std::cos(alpha_i) - std::cos(g.alpha(eta)));
  const double ft = 0.5 * (g.theta(eta, BranchMode::Unwrapped, WindowPolicy::Continue) - p.theta_i);
  return sign_or_one(p.r_dot_i) * sign_or_one(p.theta_dot_i) * fr * ft;
}

namespace detail {

inline void locate_threshold(OrderingSeries& s) {
  s.eta_star.reset();
  for (std::size_t i = s.samples.size(); i-- > 0;) {
    if (!s.samples[i].holds) break;
    s.eta_star = s.samples[i].eta;
  }
}

}  // namespace detail

inline OrderingReport volume_ratio_comparison(const ComparisonParams& p, std::span<const double> etas) {
  if (p.theta_dot_i == 0.0) throw DomainError("slice comparison needs theta_dot_i != 0");
  const ComplexityParams cp{p.r_i, p.r_dot_i, p.c_fs, 0.0};
  const GeodesicCurve fs = fs_geodesic(cp.fs_spec());
  const double w = std::abs(cp.omega());
  const double acc_fs = accessible_volume(MetricKind::FubiniStudy);
  const double acc_sj = accessible_volume(MetricKind::Sjoqvist);
  const double acc_b = accessible_volume(MetricKind::Bures);
  OrderingReport rep;
  for (double eta : etas) {
    const double v_fs =
        explored_volume(MetricKind::FubiniStudy, fs, eta, BranchMode::Principal, WindowPolicy::Continue).magnitude;
    // The Sjoqvist volume shares the angular factor and adds |omega| eta / 2.
    const double v_sj = 0.5 * w * eta * v_fs;
    const double lhs = v_sj / acc_sj, rhs = v_fs / acc_fs;
    rep.compare.samples.push_back({eta, lhs, rhs, lhs >= rhs});
    const double s_sj = std::abs(sjoqvist_slice_volume(p, eta)) / acc_sj;
    const double s_b = std::abs(bures_slice_volume(p, eta)) / acc_b;
    rep.boys.samples.push_back({eta, s_sj, s_b, s_sj >= s_b});
  }
  detail::locate_threshold(rep.compare);
  detail::locate_threshold(rep.boys);
  return rep;
}

}  // namespace qgeo
