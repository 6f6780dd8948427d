#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "qgeo/common.hpp"

namespace qgeo {

using Complex = std::complex<double>;

inline constexpr double angle_clamp_tolerance = 1e-12;
inline constexpr double state_tolerance = 1e-10;

/// Bloch-ball coordinates. theta is clamped to [0, pi] within 1e-12 and
/// phi is reduced modulo 2pi on construction.
class BlochPoint {
 public:
  BlochPoint(double r, double theta, double phi) {
    if (!std::isfinite(r) || !std::isfinite(theta) || !std::isfinite(phi))
      throw DomainError("Bloch coordinates must be finite");
    if (r < -angle_clamp_tolerance || r > 1.0 + angle_clamp_tolerance)
      throw DomainError("Bloch radius outside [0, 1]");
    if (theta < -angle_clamp_tolerance || theta > pi + angle_clamp_tolerance)
      throw DomainError("polar angle outside [0, pi]");
    r_ = std::clamp(r, 0.0, 1.0);
    theta_ = std::clamp(theta, 0.0, pi);
    phi_ = wrap_two_pi(phi);
  }

  double r() const { return r_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }
  bool is_pure() const { return r_ == 1.0; }

 private:
  double r_;
  double theta_;
  double phi_;
};

class PureState {
 public:
  explicit PureState(const Eigen::Vector2cd& amplitudes) : amplitudes_(amplitudes) {
    if (std::abs(amplitudes.norm() - 1.0) > state_tolerance)
      throw DomainError("pure state amplitudes must have unit norm");
  }

  /// |psi(theta, phi)> = (cos(theta/2), e^{i phi} sin(theta/2)).
  static PureState from_angles(double theta, double phi) {
    Eigen::Vector2cd v(Complex(std::cos(theta / 2.0), 0.0),
                       std::polar(std::sin(theta / 2.0), phi));
    return PureState(v);
  }

  const Eigen::Vector2cd& amplitudes() const { return amplitudes_; }

  Complex overlap(const PureState& other) const { return amplitudes_.dot(other.amplitudes_); }

 private:
  Eigen::Vector2cd amplitudes_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(const Eigen::Matrix2cd& entries) : entries_(entries) {
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > state_tolerance)
      throw DomainError("density matrix must be Hermitian");
    if (std::abs(entries.trace() - Complex(1.0, 0.0)) > state_tolerance)
      throw DomainError("density matrix must have unit trace");
    const double det = entries.determinant().real();
    if (det < -state_tolerance || entries(0, 0).real() < -state_tolerance ||
        entries(1, 1).real() < -state_tolerance)
      throw DomainError("density matrix must be positive semidefinite");
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
  }

  const Eigen::Matrix2cd& entries() const { return entries_; }

 private:
  Eigen::Matrix2cd entries_;
};

struct SpectralDecomposition {
  double p0;
  double p1;
  PureState e0;
  PureState e1;
};

inline DensityMatrix bloch_to_density(const BlochPoint& point) {
  const double r = point.r();
  const double c = std::cos(point.theta());
  const double s = std::sin(point.theta());
  Eigen::Matrix2cd rho;
  rho(0, 0) = 0.5 * (1.0 + r * c);
  rho(1, 1) = 0.5 * (1.0 - r * c);
  rho(0, 1) = 0.5 * r * s * std::polar(1.0, -point.phi());
  rho(1, 0) = 0.5 * r * s * std::polar(1.0, point.phi());
  return DensityMatrix(rho);
}

/// Degenerate angles (r = 0) are reported as theta = phi = 0.
inline BlochPoint density_to_bloch(const DensityMatrix& rho) {
  const Eigen::Matrix2cd& m = rho.entries();
  const double x = 2.0 * m(0, 1).real();
  const double y = -2.0 * m(0, 1).imag();
  const double z = (m(0, 0) - m(1, 1)).real();
  const double rho_xy = std::hypot(x, y);
  const double r = std::hypot(rho_xy, z);
  if (r == 0.0) return BlochPoint(0.0, 0.0, 0.0);
  const double phi = rho_xy == 0.0 ? 0.0 : std::atan2(y, x);
  return BlochPoint(std::min(r, 1.0), std::atan2(rho_xy, z), phi);
}

namespace detail {

inline PureState canonical_phase(Eigen::Vector2cd v) {
  const int lead = std::abs(v(0)) > 1e-15 ? 0 : 1;
  const Complex z = v(lead);
  v *= std::conj(z) / std::abs(z);
  v(lead) = Complex(v(lead).real(), 0.0);
  return PureState(v);
}

}  // namespace detail

/// Eigen-decomposition from the Bloch form; p0 = (1+r)/2 >= p1 = (1-r)/2.
inline SpectralDecomposition spectral(const DensityMatrix& rho) {
  const BlochPoint b = density_to_bloch(rho);
  if (b.r() == 0.0) throw DomainError("spectrum is degenerate at r = 0");
  const double t = b.theta();
  const double phi = b.phi();
  Eigen::Vector2cd e0(std::polar(std::cos(t / 2.0), -phi), Complex(std::sin(t / 2.0), 0.0));
  Eigen::Vector2cd e1(-std::polar(std::sin(t / 2.0), -phi), Complex(std::cos(t / 2.0), 0.0));
  return {0.5 * (1.0 + b.r()), 0.5 * (1.0 - b.r()), detail::canonical_phase(e0),
          detail::canonical_phase(e1)};
}

inline double purity(const DensityMatrix& rho) {
  return (rho.entries() * rho.entries()).trace().real();
}

namespace detail {

/// Eigenvalues of a 2x2 Hermitian matrix in ascending order.
inline std::array<double, 2> hermitian_eigenvalues(const Eigen::Matrix2cd& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {mean - rad, mean + rad};
}

/// Principal square root of a 2x2 positive semidefinite Hermitian matrix,
/// assembled from its closed-form eigenpairs.
inline Eigen::Matrix2cd hermitian_sqrt(const Eigen::Matrix2cd& m) {
  const auto lam = hermitian_eigenvalues(m);
  if (lam[0] < -state_tolerance) throw DomainError("matrix square root of a non-PSD matrix");
  const double l0 = std::max(lam[0], 0.0);
  const double l1 = std::max(lam[1], 0.0);
  if (lam[1] - lam[0] < 1e-300) return std::sqrt(l1) * Eigen::Matrix2cd::Identity();
  // Spectral projector onto the upper eigenvalue: (m - l0 I) / (l1 - l0).
  const Eigen::Matrix2cd p1 = (m - lam[0] * Eigen::Matrix2cd::Identity()) / (lam[1] - lam[0]);
  const Eigen::Matrix2cd p0 = Eigen::Matrix2cd::Identity() - p1;
  return std::sqrt(l0) * p0 + std::sqrt(l1) * p1;
}

}  // namespace detail

inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double p : detail::hermitian_eigenvalues(rho.entries()))
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

inline double wootters_angle(const PureState& psi_i, const PureState& psi_f) {
  return std::acos(std::min(1.0, std::abs(psi_i.overlap(psi_f))));
}

/// Squared fidelity [Tr sqrt(sqrt(rho_i) rho_f sqrt(rho_i))]^2.
inline double bures_fidelity(const DensityMatrix& rho_i, const DensityMatrix& rho_f) {
  const Eigen::Matrix2cd s = detail::hermitian_sqrt(rho_i.entries());
  Eigen::Matrix2cd inner = s * rho_f.entries() * s;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const auto lam = detail::hermitian_eigenvalues(inner);
  if (lam[0] < -state_tolerance) throw DomainError("fidelity argument is not PSD");
  // (sqrt(l0) + sqrt(l1))^2 = tr + 2 sqrt(det), with det(inner) = det(rho_i) det(rho_f).
  // Taking the determinant from the factors keeps it exactly 0 for pure states,
  // where sqrt of a rounding-level eigenvalue would otherwise cost ~1e-8.
  const double det = std::max(0.0, rho_i.entries().determinant().real()) *
                     std::max(0.0, rho_f.entries().determinant().real());
  return std::clamp(inner.trace().real() + 2.0 * std::sqrt(det), 0.0, 1.0);
}

/// arccos of the root fidelity, so that pure pairs give the Wootters angle.
inline double bures_angle(const DensityMatrix& rho_i, const DensityMatrix& rho_f) {
  return std::acos(std::sqrt(bures_fidelity(rho_i, rho_f)));
}

inline double bures_distance(const DensityMatrix& rho_i, const DensityMatrix& rho_f) {
  return std::sqrt(2.0 * (1.0 - std::sqrt(bures_fidelity(rho_i, rho_f))));
}

/// Evolves |psi(theta0, phi0)> under H = hbar omega0 sigma_z for time t.
inline BlochPoint precession_demo(double theta0, double phi0, double omega0, double t) {
  const PureState psi0 = PureState::from_angles(theta0, phi0);
  Eigen::Vector2cd psi = psi0.amplitudes();
  psi(0) *= std::polar(1.0, -omega0 * t);
  psi(1) *= std::polar(1.0, omega0 * t);
  const BlochPoint b = density_to_bloch(DensityMatrix::from_pure(PureState(psi)));
  return BlochPoint(1.0, b.theta(), b.phi());
}

}  // namespace qgeo
