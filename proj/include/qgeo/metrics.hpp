#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "qgeo/common.hpp"
#include "qgeo/states.hpp"
#include "qgeo/tensor.hpp"

namespace qgeo {

namespace detail {

template <class T>
void set_sym(T& g, int k, int i, int j, double v) {
  g[k][i][j] = v;
  g[k][j][i] = v;
}

/// Stores d_l Gamma^k_ij (and its ij mirror) at [k][i][j][l].
template <class T>
void set_sym_grad(T& dg, int k, int i, int j, int l, double v) {
  dg[k][i][j][l] = v;
  dg[k][j][i][l] = v;
}

inline void require_radius(double r, bool allow_zero) {
  if (!(r < 1.0)) throw DomainError("radial coordinate reached the pure-state boundary r = 1");
  if (r < 0.0 || (!allow_zero && r == 0.0))
    throw DomainError("radial coordinate outside the metric domain");
}

inline void require_off_pole(double theta) {
  if (std::sin(theta) == 0.0) throw DomainError("coordinate singularity: sin(theta) = 0");
}

}  // namespace detail

/// Round 2-sphere in (theta, phi) with overall factor `scale`: 1/4 is the
/// Fubini-Study metric, 1 the Bloch sphere metric.
template <MetricKind K>
struct SphereMetric {
  static constexpr int dim = 2;
  static constexpr MetricKind kind = K;
  static constexpr double scale = K == MetricKind::FubiniStudy ? 0.25 : 1.0;
  static constexpr int theta_index = 0;

  static Vec<2> coordinates(const BlochPoint& p) { return {p.theta(), p.phi()}; }

  static Mat<2> metric(const Vec<2>& x) {
    const double s = std::sin(x[0]);
    return {{{scale, 0.0}, {0.0, scale * s * s}}};
  }

  static Rank3<2> christoffel(const Vec<2>& x) {
    detail::require_off_pole(x[0]);
    const double s = std::sin(x[0]), c = std::cos(x[0]);
    Rank3<2> g{};
    g[0][1][1] = -s * c;
    detail::set_sym(g, 1, 0, 1, c / s);
    return g;
  }

  static Rank4<2> christoffel_gradient(const Vec<2>& x) {
    detail::require_off_pole(x[0]);
    const double s = std::sin(x[0]);
    Rank4<2> d{};
    d[0][1][1][0] = -std::cos(2.0 * x[0]);
    detail::set_sym_grad(d, 1, 0, 1, 0, -1.0 / (s * s));
    return d;
  }
};

using FubiniStudyMetric = SphereMetric<MetricKind::FubiniStudy>;
using BlochSphereMetric = SphereMetric<MetricKind::BlochSphere>;

struct SjoqvistMetric {
  static constexpr int dim = 3;
  static constexpr MetricKind kind = MetricKind::Sjoqvist;
  static constexpr int theta_index = 1;

  static Vec<3> coordinates(const BlochPoint& p) { return {p.r(), p.theta(), p.phi()}; }

  static Mat<3> metric(const Vec<3>& x) {
    detail::require_radius(x[0], true);
    const double s = std::sin(x[1]);
    Mat<3> g{};
    g[0][0] = 0.25 / (1.0 - x[0] * x[0]);
    g[1][1] = 0.25;
    g[2][2] = 0.25 * s * s;
    return g;
  }

  static Rank3<3> christoffel(const Vec<3>& x) {
    detail::require_radius(x[0], true);
    detail::require_off_pole(x[1]);
    const double r = x[0], s = std::sin(x[1]), c = std::cos(x[1]);
    Rank3<3> g{};
    g[0][0][0] = r / (1.0 - r * r);
    g[1][2][2] = -s * c;
    detail::set_sym(g, 2, 1, 2, c / s);
    return g;
  }

  static Rank4<3> christoffel_gradient(const Vec<3>& x) {
    detail::require_radius(x[0], true);
    detail::require_off_pole(x[1]);
    const double r = x[0], s = std::sin(x[1]);
    const double q = 1.0 - r * r;
    Rank4<3> d{};
    d[0][0][0][0] = (1.0 + r * r) / (q * q);
    d[1][2][2][1] = -std::cos(2.0 * x[1]);
    detail::set_sym_grad(d, 2, 1, 2, 1, -1.0 / (s * s));
    return d;
  }
};

struct BuresMetric {
  static constexpr int dim = 3;
  static constexpr MetricKind kind = MetricKind::Bures;
  static constexpr int theta_index = 1;

  static Vec<3> coordinates(const BlochPoint& p) { return {p.r(), p.theta(), p.phi()}; }

  static Mat<3> metric(const Vec<3>& x) {
    detail::require_radius(x[0], true);
    const double r = x[0], s = std::sin(x[1]);
    Mat<3> g{};
    g[0][0] = 0.25 / (1.0 - r * r);
    g[1][1] = 0.25 * r * r;
    g[2][2] = 0.25 * r * r * s * s;
    return g;
  }

  static Rank3<3> christoffel(const Vec<3>& x) {
    detail::require_radius(x[0], false);
    detail::require_off_pole(x[1]);
    const double r = x[0], s = std::sin(x[1]), c = std::cos(x[1]);
    const double q = 1.0 - r * r;
    Rank3<3> g{};
    g[0][0][0] = r / q;
    g[0][1][1] = -r * q;
    g[0][2][2] = -r * q * s * s;
    detail::set_sym(g, 1, 0, 1, 1.0 / r);
    g[1][2][2] = -s * c;
    detail::set_sym(g, 2, 0, 2, 1.0 / r);
    detail::set_sym(g, 2, 1, 2, c / s);
    return g;
  }

  static Rank4<3> christoffel_gradient(const Vec<3>& x) {
    detail::require_radius(x[0], false);
    detail::require_off_pole(x[1]);
    const double r = x[0], s = std::sin(x[1]), th = x[1];
    const double q = 1.0 - r * r;
    Rank4<3> d{};
    d[0][0][0][0] = (1.0 + r * r) / (q * q);
    d[0][1][1][0] = -(1.0 - 3.0 * r * r);
    d[0][2][2][0] = -(1.0 - 3.0 * r * r) * s * s;
    d[0][2][2][1] = -r * q * std::sin(2.0 * th);
    detail::set_sym_grad(d, 1, 0, 1, 0, -1.0 / (r * r));
    d[1][2][2][1] = -std::cos(2.0 * th);
    detail::set_sym_grad(d, 2, 0, 2, 0, -1.0 / (r * r));
    detail::set_sym_grad(d, 2, 1, 2, 1, -1.0 / (s * s));
    return d;
  }
};

/// Calls `f` with a value of the policy type matching `kind`.
template <class F>
decltype(auto) visit_metric(MetricKind kind, F&& f) {
  switch (kind) {
    case MetricKind::FubiniStudy: return std::forward<F>(f)(FubiniStudyMetric{});
    case MetricKind::Sjoqvist: return std::forward<F>(f)(SjoqvistMetric{});
    case MetricKind::Bures: return std::forward<F>(f)(BuresMetric{});
    case MetricKind::BlochSphere: return std::forward<F>(f)(BlochSphereMetric{});
  }
  throw std::invalid_argument("unknown metric kind");
}

struct MetricEvaluation {
  int dim = 0;
  Mat<3> components{};
  double determinant = 0.0;
  double fisher_density = 0.0;
  /// Set where the chart degenerates (sin(theta) = 0, or r = 0 for Bures).
  bool coordinate_singular = false;
};

inline MetricEvaluation metric_tensor(MetricKind kind, const BlochPoint& point) {
  return visit_metric(kind, [&]<class M>(M) {
    const auto g = M::metric(M::coordinates(point));
    MetricEvaluation ev;
    ev.dim = M::dim;
    for (int i = 0; i < M::dim; ++i)
      for (int j = 0; j < M::dim; ++j) ev.components[i][j] = g[i][j];
    ev.determinant = determinant<M::dim>(g);
    ev.fisher_density = std::sqrt(std::max(ev.determinant, 0.0));
    ev.coordinate_singular = ev.determinant == 0.0;
    return ev;
  });
}

template <class M>
double line_element_at(const Vec<M::dim>& x, const Vec<M::dim>& dx) {
  return quadratic_form<M::dim>(M::metric(x), dx, dx);
}

inline double line_element(MetricKind kind, const BlochPoint& point,
                           std::span<const double> displacement) {
  return visit_metric(kind, [&]<class M>(M) {
    if (static_cast<int>(displacement.size()) != M::dim)
      throw std::invalid_argument("displacement dimension does not match the metric");
    Vec<M::dim> dx{};
    std::copy(displacement.begin(), displacement.end(), dx.begin());
    return line_element_at<M>(M::coordinates(point), dx);
  });
}

inline double fs_overlap_check(const PureState& psi, const PureState& psi_bar) {
  const double ov = std::abs(psi_bar.overlap(psi));
  return 1.0 - ov * ov;
}

/// sum_k (1/p_k) dp_k/dxi^mu dp_k/dxi^nu; jacobian rows index k, columns mu.
inline Eigen::MatrixXd fisher_rao_discrete(const Eigen::VectorXd& probabilities,
                                           const Eigen::MatrixXd& jacobian) {
  if (jacobian.rows() != probabilities.size())
    throw std::invalid_argument("jacobian rows must match the number of probabilities");
  if (std::abs(probabilities.sum() - 1.0) > 1e-12)
    throw DomainError("probabilities must sum to 1");
  if ((probabilities.array() <= 0.0).any())
    throw DomainError("probabilities must be strictly positive");
  const Eigen::VectorXd w = probabilities.cwiseInverse();
  return jacobian.transpose() * w.asDiagonal() * jacobian;
}

struct SjoqvistParts {
  double classical;
  double quantum;
};

/// Splits the Sjoqvist line element into its eigenvalue (classical) and
/// eigenvector (quantum) contributions.
inline SjoqvistParts sjoqvist_decomposition(const BlochPoint& point,
                                            std::span<const double> displacement) {
  if (displacement.size() != 3) throw std::invalid_argument("Sjoqvist displacement is 3-D");
  const double r = point.r(), th = point.theta(), ph = point.phi();
  if (!(r > 0.0 && r < 1.0)) throw DomainError("Sjoqvist decomposition needs 0 < r < 1");
  const double dr = displacement[0], dth = displacement[1], dph = displacement[2];

  Eigen::VectorXd p(2);
  p << 0.5 * (1.0 + r), 0.5 * (1.0 - r);
  Eigen::MatrixXd jac(2, 1);
  jac << 0.5, -0.5;
  const double classical = 0.25 * fisher_rao_discrete(p, jac)(0, 0) * dr * dr;

  const double ch = std::cos(th / 2.0), sh = std::sin(th / 2.0);
  const Complex em = std::polar(1.0, -ph);
  const Complex i1(0.0, 1.0);
  const Eigen::Vector2cd e0(em * ch, sh);
  const Eigen::Vector2cd e1(-em * sh, ch);
  const Eigen::Vector2cd de0 = dth * Eigen::Vector2cd(-0.5 * em * sh, 0.5 * ch) +
                               dph * Eigen::Vector2cd(-i1 * em * ch, 0.0);
  const Eigen::Vector2cd de1 = dth * Eigen::Vector2cd(-0.5 * em * ch, -0.5 * sh) +
                               dph * Eigen::Vector2cd(i1 * em * sh, 0.0);
  auto fs = [](const Eigen::Vector2cd& e, const Eigen::Vector2cd& de) {
    return de.squaredNorm() - std::norm(e.dot(de));
  };
  const double quantum = p(0) * fs(e0, de0) + p(1) * fs(e1, de1);
  return {classical, quantum};
}

/// The matrix (1 + r n.sigma)/2 without state validation, for differencing.
inline Eigen::Matrix2cd bloch_matrix(double r, double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2cd m;
  m(0, 0) = 0.5 * (1.0 + r * c);
  m(1, 1) = 0.5 * (1.0 - r * c);
  m(0, 1) = 0.5 * r * s * std::polar(1.0, -phi);
  m(1, 0) = std::conj(m(0, 1));
  return m;
}

/// Analytic first-order change of rho for a coordinate displacement.
inline Eigen::Matrix2cd density_differential(const BlochPoint& point,
                                             std::span<const double> displacement) {
  if (displacement.size() != 3) throw std::invalid_argument("displacement must be 3-D");
  const double r = point.r(), th = point.theta(), ph = point.phi();
  const double dr = displacement[0], dth = displacement[1], dph = displacement[2];
  const double c = std::cos(th), s = std::sin(th);
  const Complex em = std::polar(1.0, -ph);
  Eigen::Matrix2cd d;
  d(0, 0) = 0.5 * (dr * c - r * s * dth);
  d(1, 1) = -d(0, 0);
  d(0, 1) = 0.5 * em * (dr * s + r * c * dth - Complex(0.0, 1.0) * r * s * dph);
  d(1, 0) = std::conj(d(0, 1));
  return d;
}

/// (1/2) sum_{m,n} |<e_m|drho|e_n>|^2 / (p_m + p_n) in the eigenbasis of rho.
inline double bures_spectral_sum(const BlochPoint& point, const Eigen::Matrix2cd& drho) {
  if (point.r() == 0.0) throw DomainError("spectral sum needs a nondegenerate spectrum");
  const auto sd = spectral(bloch_to_density(point));
  const std::array<double, 2> p{sd.p0, sd.p1};
  const std::array<Eigen::Vector2cd, 2> e{sd.e0.amplitudes(), sd.e1.amplitudes()};
  double sum = 0.0;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) sum += std::norm(e[m].dot(drho * e[n])) / (p[m] + p[n]);
  return 0.5 * sum;
}

struct SpectralSumOptions {
  double h = 1e-4;
  bool richardson = true;
};

/// Spectral-sum Bures line element with d rho taken by central differences
/// of rho along the displacement.
inline double bures_from_spectral(const BlochPoint& point, std::span<const double> displacement,
                                  SpectralSumOptions opt = {}) {
  if (displacement.size() != 3) throw std::invalid_argument("displacement must be 3-D");
  const double r = point.r(), th = point.theta(), ph = point.phi();
  if (!(r > 0.0 && r < 1.0)) throw DomainError("spectral sum needs 0 < r < 1");
  auto at_step = [&](double h) {
    const Eigen::Matrix2cd plus =
        bloch_matrix(r + h * displacement[0], th + h * displacement[1], ph + h * displacement[2]);
    const Eigen::Matrix2cd minus =
        bloch_matrix(r - h * displacement[0], th - h * displacement[1], ph - h * displacement[2]);
    return bures_spectral_sum(point, (plus - minus) / (2.0 * h));
  };
  const double coarse = at_step(opt.h);
  if (!opt.richardson) return coarse;
  return (4.0 * at_step(0.5 * opt.h) - coarse) / 3.0;
}

enum class MCPFunction { Bures, Sjoqvist };

inline double mcp_f(MCPFunction f, double t) {
  if (f == MCPFunction::Bures) return 0.5 * (1.0 + t);
  return 0.5 * (1.0 - t) * (1.0 - t) / (1.0 + t);
}

/// Canonical monotone-metric form with t = (1-r)/(1+r).
inline double mcp_metric(MCPFunction f, const BlochPoint& point,
                         std::span<const double> displacement) {
  if (displacement.size() != 3) throw std::invalid_argument("displacement must be 3-D");
  const double r = point.r();
  if (!(r < 1.0)) throw DomainError("MCP form needs r < 1");
  const double t = (1.0 - r) / (1.0 + r);
  const double fv = mcp_f(f, t);
  if (fv == 0.0) throw DomainError("f(t) = 0: conical singularity of the metric");
  const double s = std::sin(point.theta());
  const double dr = displacement[0], dth = displacement[1], dph = displacement[2];
  const double domega = dth * dth + s * s * dph * dph;
  return 0.25 * (dr * dr / (1.0 - r * r) + (r * r / (1.0 + r)) * domega / fv);
}

}  // namespace qgeo
