#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qgeo/metrics.hpp"
#include "qgeo/rk4.hpp"

namespace qgeo {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Whether a closed form may be evaluated past the end of its validity window
/// (analytic continuation) or must raise WindowError there.
enum class WindowPolicy { Enforce, Continue };

/// Initial data for a geodesic. For 2-D metrics r and r_dot are ignored.
struct GeodesicSpec {
  MetricKind kind = MetricKind::FubiniStudy;
  double r = 1.0;
  double theta = pi / 2.0;
  double phi = 0.0;
  double r_dot = 0.0;
  double theta_dot = 0.0;
  double phi_dot = 0.0;
};

namespace detail {

inline void check_window(double eta, double end, WindowPolicy policy) {
  if (policy == WindowPolicy::Continue) return;
  if (eta < 0.0 || eta > end) throw WindowError("parameter outside the curve's validity window");
}

inline void validate_spec(const GeodesicSpec& s) {
  for (double v : {s.r, s.theta, s.phi, s.r_dot, s.theta_dot, s.phi_dot})
    if (!std::isfinite(v)) throw DomainError("geodesic initial data must be finite");
  if (s.theta < 0.0 || s.theta > pi) throw DomainError("initial theta outside [0, pi]");
  if (has_radial_coordinate(s.kind) && (s.r < 0.0 || s.r > 1.0))
    throw DomainError("initial r outside [0, 1]");
}

}  // namespace detail

/// Fubini-Study geodesic cos(theta) = a sin(v eta + delta) with
/// phi = phi_i + F(v eta + delta) - F(delta), F(u) = arctan(k tan u), k = c/v.
class GreatCircleGeodesic {
 public:
  GreatCircleGeodesic(double theta_i, double phi_i, double theta_dot_i, double phi_dot_i)
      : theta_i_(theta_i), phi_i_(phi_i), theta_dot_i_(theta_dot_i), phi_dot_i_(phi_dot_i) {
    if (theta_i < 0.0 || theta_i > pi) throw DomainError("initial theta outside [0, pi]");
    const double s = std::sin(theta_i);
    v_ = std::hypot(theta_dot_i, s * phi_dot_i);
    c_ = phi_dot_i * s * s;
    if (v_ == 0.0) return;
    k_ = c_ / v_;
    const double tz = -s * theta_dot_i / v_;
    a_ = std::hypot(std::cos(theta_i), tz);
    delta_ = a_ == 0.0 ? 0.0 : std::atan2(std::cos(theta_i), tz);
    if (k_ == 0.0 && a_ > 0.0) {
      // Meridian: the next pole is the first u > delta with |sin u| = 1.
      const double u_pole = pi / 2.0 + pi * std::floor((delta_ - pi / 2.0) / pi + 1.0);
      window_end_ = (u_pole - delta_) / v_;
    }
  }

  double a_fs() const { return a_; }
  /// phi_dot sin^2 theta, the conserved angular constant.
  double c_fs() const { return c_; }
  /// c_fs divided by the angular rate v; equals c_fs for unit-rate specs.
  double k() const { return k_; }
  double rate() const { return v_; }
  double phase() const { return delta_; }
  double theta_i() const { return theta_i_; }
  double phi_i() const { return phi_i_; }
  double theta_dot_i() const { return theta_dot_i_; }
  double phi_dot_i() const { return phi_dot_i_; }
  double window_end() const { return window_end_; }

  double u(double eta) const { return v_ * eta + delta_; }

  double theta(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    if (v_ == 0.0) return theta_i_;
    return std::acos(std::clamp(a_ * std::sin(u(eta)), -1.0, 1.0));
  }

  double phi(double eta, BranchMode mode = BranchMode::Unwrapped,
             WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    if (v_ == 0.0) return phi_i_;
    return phi_i_ + arctan_k_tan(k_, u(eta), mode) - arctan_k_tan(k_, delta_, mode);
  }

  double theta_dot(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    if (v_ == 0.0) return 0.0;
    const double uu = u(eta);
    const double s = std::sqrt(std::max(0.0, 1.0 - std::pow(a_ * std::sin(uu), 2)));
    if (s == 0.0) throw DomainError("theta rate undefined at a pole");
    return -a_ * v_ * std::cos(uu) / s;
  }

  double phi_dot(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    if (v_ == 0.0 || k_ == 0.0) return 0.0;
    const double su = std::sin(u(eta)), cu = std::cos(u(eta));
    return k_ * v_ / (cu * cu + k_ * k_ * su * su);
  }

  Vec<2> position(double eta, BranchMode mode = BranchMode::Unwrapped,
                  WindowPolicy policy = WindowPolicy::Enforce) const {
    return {theta(eta, policy), phi(eta, mode, policy)};
  }

  Vec<2> velocity(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    return {theta_dot(eta, policy), phi_dot(eta, policy)};
  }

 private:
  double theta_i_, phi_i_, theta_dot_i_, phi_dot_i_;
  double v_ = 0.0, c_ = 0.0, k_ = 0.0, a_ = 0.0, delta_ = 0.0;
  double window_end_ = infinity;
};

/// r(eta) = sin(alpha(eta)), alpha = arcsin(r_i) + omega eta,
/// omega = r_dot_i / sqrt(1 - r_i^2).
class SjoqvistRadial {
 public:
  SjoqvistRadial(double r_i, double r_dot_i) : r_i_(r_i), r_dot_i_(r_dot_i) {
    if (!(r_i >= 0.0 && r_i <= 1.0)) throw DomainError("initial r outside [0, 1]");
    if (r_i == 1.0 && r_dot_i != 0.0) throw DomainError("r_i = 1 requires zero radial rate");
    if (r_i == 0.0 && r_dot_i < 0.0) throw DomainError("r_i = 0 requires a nonnegative rate");
    alpha_i_ = std::asin(r_i);
    omega_ = r_i == 1.0 ? 0.0 : r_dot_i / std::sqrt((1.0 - r_i) * (1.0 + r_i));
    if (omega_ > 0.0) window_end_ = (pi / 2.0 - alpha_i_) / omega_;
    if (omega_ < 0.0) window_end_ = alpha_i_ / -omega_;
  }

  double r_i() const { return r_i_; }
  double r_dot_i() const { return r_dot_i_; }
  double omega() const { return omega_; }
  double alpha_i() const { return alpha_i_; }
  double window_end() const { return window_end_; }

  /// Continued radial angle; r = sin(alpha) inside the window.
  double alpha(double eta) const { return alpha_i_ + omega_ * eta; }

  double r(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    return std::sin(alpha(eta));
  }

  double r_dot(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    return omega_ * std::cos(alpha(eta));
  }

 private:
  double r_i_, r_dot_i_;
  double alpha_i_ = 0.0, omega_ = 0.0;
  double window_end_ = infinity;
};

/// Sjoqvist geodesic: decoupled radial motion and a Fubini-Study great circle.
class SjoqvistGeodesic {
 public:
  SjoqvistGeodesic(const SjoqvistRadial& radial, const GreatCircleGeodesic& angular)
      : radial_(radial), angular_(angular) {}

  const SjoqvistRadial& radial() const { return radial_; }
  const GreatCircleGeodesic& angular() const { return angular_; }
  double window_end() const { return std::min(radial_.window_end(), angular_.window_end()); }

  Vec<3> position(double eta, BranchMode mode = BranchMode::Unwrapped,
                  WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end(), policy);
    return {radial_.r(eta, WindowPolicy::Continue), angular_.theta(eta, WindowPolicy::Continue),
            angular_.phi(eta, mode, WindowPolicy::Continue)};
  }

  Vec<3> velocity(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end(), policy);
    return {radial_.r_dot(eta, WindowPolicy::Continue),
            angular_.theta_dot(eta, WindowPolicy::Continue),
            angular_.phi_dot(eta, WindowPolicy::Continue)};
  }

 private:
  SjoqvistRadial radial_;
  GreatCircleGeodesic angular_;
};

/// Sjoqvist geodesic with theta as the curve parameter (phi fixed):
/// r(theta) = sin(arcsin r_i + m (theta - theta_i)).
class SjoqvistThetaCurve {
 public:
  static SjoqvistThetaCurve from_boundary(double r_i, double r_f, double theta_f) {
    if (!(theta_f > 0.0)) throw DomainError("theta_f must be positive");
    for (double r : {r_i, r_f})
      if (!(r > 0.0 && r <= 1.0)) throw DomainError("boundary radii must lie in (0, 1]");
    return SjoqvistThetaCurve(r_i, (std::asin(r_f) - std::asin(r_i)) / theta_f, 0.0);
  }

  static SjoqvistThetaCurve from_initial(double r_i, double r_prime_i, double theta_i = 0.0) {
    if (!(r_i > 0.0 && r_i < 1.0)) throw DomainError("initial radius must lie in (0, 1)");
    return SjoqvistThetaCurve(r_i, r_prime_i / std::sqrt((1.0 - r_i) * (1.0 + r_i)), theta_i);
  }

  double slope() const { return m_; }
  double theta_i() const { return theta_i_; }
  /// Beltrami constant r'^2 / (1 - r^2).
  double beltrami_k() const { return m_ * m_; }
  /// c_S = 1 / sqrt(1 + m^2), in (0, 1].
  double c_s() const { return 1.0 / std::sqrt(1.0 + m_ * m_); }

  double alpha(double theta) const { return alpha_i_ + m_ * (theta - theta_i_); }
  double r(double theta) const { return std::sin(alpha(theta)); }
  double r_prime(double theta) const { return m_ * std::cos(alpha(theta)); }

 private:
  SjoqvistThetaCurve(double r_i, double m, double theta_i)
      : alpha_i_(std::asin(r_i)), m_(m), theta_i_(theta_i) {}
  double alpha_i_, m_, theta_i_;
};

inline SjoqvistThetaCurve sjoqvist_r_of_theta(double r_i, double r_f, double theta_f) {
  return SjoqvistThetaCurve::from_boundary(r_i, r_f, theta_f);
}

/// Euler-Lagrange residual d/dtheta(dL/dr') - dL/dr for L = sqrt(1 + r'^2/(1-r^2)),
/// with the outer derivative taken by a fourth-order central difference.
inline double sjoqvist_el_residual(const SjoqvistThetaCurve& c, double theta, double h = 1e-3) {
  auto p = [&](double th) {
    const double r = c.r(th), rp = c.r_prime(th), q = 1.0 - r * r;
    return rp / (q * std::sqrt(1.0 + rp * rp / q));
  };
  const double dp = (-p(theta + 2 * h) + 8 * p(theta + h) - 8 * p(theta - h) + p(theta - 2 * h)) /
                    (12.0 * h);
  const double r = c.r(theta), rp = c.r_prime(theta), q = 1.0 - r * r;
  const double dl_dr = r * rp * rp / (q * q * std::sqrt(1.0 + rp * rp / q));
  return dp - dl_dr;
}

namespace detail {

struct BuresConstants {
  double a;
  double A;
};

inline BuresConstants bures_constants(double r_i, double r_prime_i) {
  if (!(r_i > 0.0 && r_i < 1.0)) throw DomainError("Bures closed forms need 0 < r_i < 1");
  const double q = (1.0 - r_i) * (1.0 + r_i);
  const double a = 1.0 / (r_i * r_i) + r_prime_i * r_prime_i / (r_i * r_i * r_i * r_i * q);
  const double A = r_prime_i == 0.0 ? pi / 2.0 : std::atan(r_i * q / r_prime_i);
  return {a, A};
}

}  // namespace detail

/// Bures geodesic with theta as parameter (phi fixed):
/// r(theta)^2 = (1 + T^2)/(1 + a T^2), T = tan(A - (theta - theta_i)).
class BuresThetaCurve {
 public:
  BuresThetaCurve(double r_i, double r_prime_i, double theta_i)
      : r_i_(r_i), r_prime_i_(r_prime_i), theta_i_(theta_i) {
    const auto k = detail::bures_constants(r_i, r_prime_i);
    a_ = k.a;
    A_ = k.A;
    lo_ = A_ > 0.0 ? A_ - pi : A_;
    hi_ = A_ > 0.0 ? A_ : A_ + pi;
  }

  double a_b() const { return a_; }
  double script_a() const { return A_; }
  double theta_i() const { return theta_i_; }
  /// Beltrami constant r^2 / sqrt(r^2 + r'^2/(1-r^2)) = 1/sqrt(a).
  double c_b() const { return 1.0 / std::sqrt(a_); }
  /// Open interval of theta on which r < 1.
  std::pair<double, double> theta_window() const { return {theta_i_ + lo_, theta_i_ + hi_}; }

  double r(double theta) const {
    check(theta);
    const double w = A_ - (theta - theta_i_);
    const double s = std::sin(w), c = std::cos(w);
    return 1.0 / std::sqrt(c * c + a_ * s * s);
  }

  double r_prime(double theta) const {
    const double rr = r(theta);
    const double w = A_ - (theta - theta_i_);
    return 0.5 * (a_ - 1.0) * std::sin(2.0 * w) * rr * rr * rr;
  }

  double beltrami(double theta) const {
    const double rr = r(theta), rp = r_prime(theta);
    return rr * rr / std::sqrt(rr * rr + rp * rp / ((1.0 - rr) * (1.0 + rr)));
  }

 private:
  void check(double theta) const {
    const double d = theta - theta_i_;
    if (d < lo_ || d > hi_) throw WindowError("theta outside the Bures r(theta) window");
  }
  double r_i_, r_prime_i_, theta_i_;
  double a_ = 1.0, A_ = 0.0, lo_ = 0.0, hi_ = 0.0;
};

inline BuresThetaCurve bures_r_of_theta(double r_i, double r_prime_i, double theta_i = 0.0) {
  return BuresThetaCurve(r_i, r_prime_i, theta_i);
}

/// Bures geodesic at fixed phi in the affine parameter:
/// u = B - sqrt(a) r_i^2 theta_dot_i eta, B = arctan(sqrt(a) tan A),
/// theta = theta_i + A - arctan(tan(u)/sqrt(a)), r^2 = cos^2 u + sin^2 u / a.
class BuresEtaGeodesic {
 public:
  BuresEtaGeodesic(double r_i, double theta_i, double theta_dot_i, double r_prime_i,
                   double phi = 0.0)
      : r_i_(r_i), theta_i_(theta_i), theta_dot_i_(theta_dot_i), r_prime_i_(r_prime_i), phi_(phi) {
    if (theta_dot_i == 0.0)
      throw DomainError("pure radial Bures motion has no closed form; integrate numerically");
    const auto k = detail::bures_constants(r_i, r_prime_i);
    a_ = k.a;
    A_ = k.A;
    sqa_ = std::sqrt(a_);
    B_ = arctan_k_tan(sqa_, A_);
    kappa_ = sqa_ * r_i * r_i * theta_dot_i;
    if (kappa_ > 0.0)
      window_end_ = (B_ > 0.0 ? B_ : B_ + pi) / kappa_;
    else
      window_end_ = (B_ < 0.0 ? B_ : B_ - pi) / kappa_;
  }

  double a_b() const { return a_; }
  double script_a() const { return A_; }
  double b() const { return B_; }
  double kappa() const { return kappa_; }
  double r_i() const { return r_i_; }
  double theta_i() const { return theta_i_; }
  double theta_dot_i() const { return theta_dot_i_; }
  double r_prime_i() const { return r_prime_i_; }
  double phi() const { return phi_; }
  double window_end() const { return window_end_; }

  double u(double eta) const { return B_ - kappa_ * eta; }

  double theta(double eta, BranchMode mode = BranchMode::Unwrapped,
               WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    return theta_i_ + A_ - arctan_k_tan(1.0 / sqa_, u(eta), mode);
  }

  double r(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    detail::check_window(eta, window_end_, policy);
    const double s = std::sin(u(eta)), c = std::cos(u(eta));
    return std::sqrt(c * c + s * s / a_);
  }

  double r_dot(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    const double rr = r(eta, policy);
    const double s = std::sin(u(eta)), c = std::cos(u(eta));
    return kappa_ * (1.0 - 1.0 / a_) * s * c / rr;
  }

  double theta_dot(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    const double rr = r(eta, policy);
    return r_i_ * r_i_ * theta_dot_i_ / (rr * rr);
  }

  /// Radial angle continued through the r = 1 touch points (r = sin alpha).
  double alpha(double eta) const {
    const double sb = std::sin(B_) >= 0.0 ? 1.0 : -1.0;
    const double cos_alpha = sb * std::sin(u(eta)) * std::sqrt(1.0 - 1.0 / a_);
    return std::acos(std::clamp(cos_alpha, -1.0, 1.0));
  }

  Vec<3> position(double eta, BranchMode mode = BranchMode::Unwrapped,
                  WindowPolicy policy = WindowPolicy::Enforce) const {
    return {r(eta, policy), theta(eta, mode, policy), phi_};
  }

  Vec<3> velocity(double eta, WindowPolicy policy = WindowPolicy::Enforce) const {
    return {r_dot(eta, policy), theta_dot(eta, policy), 0.0};
  }

 private:
  double r_i_, theta_i_, theta_dot_i_, r_prime_i_, phi_;
  double a_ = 1.0, A_ = 0.0, sqa_ = 1.0, B_ = 0.0, kappa_ = 0.0;
  double window_end_ = infinity;
};

inline BuresEtaGeodesic bures_geodesic_eta(double r_i, double theta_i, double theta_dot_i,
                                           double r_prime_i) {
  return BuresEtaGeodesic(r_i, theta_i, theta_dot_i, r_prime_i);
}

/// RK4 trajectory; positions and velocities are padded to three slots with
/// `dim` telling how many are meaningful.
struct NumericGeodesic {
  MetricKind kind{};
  int dim = 0;
  std::vector<double> eta;
  std::vector<Vec<3>> position;
  std::vector<Vec<3>> velocity;
  std::optional<double> boundary_event;
};

using GeodesicCurve = std::variant<GreatCircleGeodesic, SjoqvistGeodesic, BuresThetaCurve,
                                   BuresEtaGeodesic, NumericGeodesic>;

inline GreatCircleGeodesic fs_geodesic(const GeodesicSpec& spec) {
  detail::validate_spec(spec);
  if (spec.kind != MetricKind::FubiniStudy && spec.kind != MetricKind::BlochSphere)
    throw std::invalid_argument("fs_geodesic needs a sphere metric spec");
  return GreatCircleGeodesic(spec.theta, spec.phi, spec.theta_dot, spec.phi_dot);
}

inline SjoqvistGeodesic sjoqvist_geodesic(const GeodesicSpec& spec) {
  detail::validate_spec(spec);
  if (spec.kind != MetricKind::Sjoqvist) throw std::invalid_argument("spec is not Sjoqvist");
  return SjoqvistGeodesic(SjoqvistRadial(spec.r, spec.r_dot),
                          GreatCircleGeodesic(spec.theta, spec.phi, spec.theta_dot, spec.phi_dot));
}

/// Max over samples of |cot theta - s sqrt((1-k^2)/k^2) sin(phi - phi_ref)|
/// with the sign s fixed once for the whole curve. phi_ref is phi_i shifted
/// by the phase offset, so it equals phi_i when theta_i = pi/2.
inline double great_circle_residual(const GreatCircleGeodesic& c, std::span<const double> etas) {
  if (c.rate() == 0.0 || c.a_fs() == 0.0) return 0.0;
  if (c.k() == 0.0) throw DomainError("great-circle form needs c_FS != 0");
  const double amp = c.a_fs() / std::abs(c.k());
  const double phi_ref = c.phi_i() - arctan_k_tan(c.k(), c.phase());
  double best = infinity;
  for (double sign : {1.0, -1.0}) {
    double worst = 0.0;
    for (double eta : etas) {
      const double th = c.theta(eta, WindowPolicy::Continue);
      const double ph = c.phi(eta, BranchMode::Unwrapped, WindowPolicy::Continue);
      worst = std::max(worst, std::abs(std::cos(th) / std::sin(th) - sign * amp * std::sin(ph - phi_ref)));
    }
    best = std::min(best, worst);
  }
  return best;
}

template <class M>
double speed_at(const Vec<M::dim>& x, const Vec<M::dim>& v) {
  return std::sqrt(std::max(0.0, quadratic_form<M::dim>(M::metric(x), v, v)));
}

/// sqrt(g_{mu nu} xi_dot^mu xi_dot^nu); coordinates and velocity follow the
/// metric's chart ((theta, phi) or (r, theta, phi)).
inline double speed(MetricKind kind, std::span<const double> coords, std::span<const double> velocity) {
  return visit_metric(kind, [&]<class M>(M) {
    if (static_cast<int>(coords.size()) != M::dim || static_cast<int>(velocity.size()) != M::dim)
      throw std::invalid_argument("coordinate/velocity dimension does not match the metric");
    Vec<M::dim> x{}, v{};
    std::copy(coords.begin(), coords.end(), x.begin());
    std::copy(velocity.begin(), velocity.end(), v.begin());
    return speed_at<M>(x, v);
  });
}

struct ConservedQuantities {
  double speed = 0.0;
  /// phi_dot sin^2 theta (sphere, Sjoqvist) or r^2 theta_dot (Bures).
  double angular = 0.0;
  /// r_dot^2 / (1 - r^2) for Sjoqvist, whose radial motion decouples; 0 otherwise.
  double radial = 0.0;
};

inline ConservedQuantities conserved_quantities(MetricKind kind, std::span<const double> coords,
                                                std::span<const double> velocity) {
  ConservedQuantities q;
  q.speed = speed(kind, coords, velocity);
  if (!has_radial_coordinate(kind)) {
    const double s = std::sin(coords[0]);
    q.angular = velocity[1] * s * s;
    return q;
  }
  const double r = coords[0];
  if (kind == MetricKind::Bures) {
    q.angular = r * r * velocity[1];
  } else {
    const double s = std::sin(coords[1]);
    q.angular = velocity[2] * s * s;
    q.radial = velocity[0] * velocity[0] / ((1.0 - r) * (1.0 + r));
  }
  return q;
}

struct StepControl {
  double step = 1e-3;
  double event_tolerance = 1e-10;
  /// Allowed disagreement between one step and two half steps.
  double local_tolerance = 1e-8;
  /// Distance to r in {0, 1} or to sin(theta) = 0 that counts as a boundary.
  double boundary_tolerance = 1e-9;
};

template <class M>
NumericGeodesic integrate_geodesic_at(const Vec<M::dim>& x0, const Vec<M::dim>& v0,
                                      double eta_max, StepControl ctl) {
  constexpr int D = M::dim;
  Vec<2 * D> y0{};
  for (int i = 0; i < D; ++i) {
    y0[i] = x0[i];
    y0[D + i] = v0[i];
  }
  auto rhs = [](double, const Vec<2 * D>& y) {
    Vec<D> x{};
    for (int i = 0; i < D; ++i) x[i] = y[i];
    // A stage past r = 1 still yields finite Christoffels, so reject it here.
    if constexpr (D == 3)
      if (!(x[0] > 0.0 && x[0] < 1.0)) throw DomainError("stage left the Bloch ball");
    const Rank3<D> G = M::christoffel(x);
    Vec<2 * D> dy{};
    for (int k = 0; k < D; ++k) {
      dy[k] = y[D + k];
      double acc = 0.0;
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) acc += G[k][i][j] * y[D + i] * y[D + j];
      dy[D + k] = -acc;
    }
    return dy;
  };
  const double tol = ctl.boundary_tolerance;
  auto margin = [tol](const Vec<2 * D>& y) {
    double m = std::abs(std::sin(y[M::theta_index])) - tol;
    if constexpr (D == 3) m = std::min({m, y[0] - tol, 1.0 - tol - y[0]});
    return m;
  };
  const auto traj = rk4_integrate<2 * D>(rhs, y0, 0.0, eta_max, ctl.step, margin, ctl.event_tolerance,
                                           ctl.local_tolerance);
  NumericGeodesic out;
  out.kind = M::kind;
  out.dim = D;
  out.boundary_event = traj.event;
  out.eta = traj.t;
  for (const auto& y : traj.y) {
    Vec<3> p{}, v{};
    for (int i = 0; i < D; ++i) {
      p[i] = y[i];
      v[i] = y[D + i];
    }
    out.position.push_back(p);
    out.velocity.push_back(v);
  }
  return out;
}

inline NumericGeodesic integrate_geodesic(const GeodesicSpec& spec, double eta_max,
                                          StepControl ctl = {}) {
  detail::validate_spec(spec);
  return visit_metric(spec.kind, [&]<class M>(M) {
    Vec<M::dim> x{}, v{};
    if constexpr (M::dim == 2) {
      x = {spec.theta, spec.phi};
      v = {spec.theta_dot, spec.phi_dot};
    } else {
      x = {spec.r, spec.theta, spec.phi};
      v = {spec.r_dot, spec.theta_dot, spec.phi_dot};
    }
    return integrate_geodesic_at<M>(x, v, eta_max, ctl);
  });
}

}  // namespace qgeo
