#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qgeo/metrics.hpp"

namespace qgeo {

enum class SignConvention { Paper, Weinberg };

enum class FrameAxis { R, Theta, Phi };

inline std::string_view to_string(FrameAxis a) {
  switch (a) {
    case FrameAxis::R: return "r";
    case FrameAxis::Theta: return "theta";
    case FrameAxis::Phi: return "phi";
  }
  return "?";
}

struct TangentPlane {
  FrameAxis first;
  FrameAxis second;
};

namespace detail {

inline int axis_index(MetricKind kind, FrameAxis a) {
  const bool radial = has_radial_coordinate(kind);
  if (a == FrameAxis::R) {
    if (!radial) throw std::invalid_argument("r axis is not available on a 2-D metric");
    return 0;
  }
  const int base = radial ? 1 : 0;
  return base + (a == FrameAxis::Theta ? 0 : 1);
}

/// Sixth-order central difference of a (nested array) valued f along coordinate l.
template <int D, class F>
auto central_difference(F&& f, Vec<D> x, int l, double h) {
  auto at = [&](double off) {
    Vec<D> y = x;
    y[l] += off;
    return f(y);
  };
  const auto p3 = at(3.0 * h), p2 = at(2.0 * h), p1 = at(h);
  const auto m1 = at(-h), m2 = at(-2.0 * h), m3 = at(-3.0 * h);
  auto out = p1;
  auto combine = [&](auto& o, const auto& a3, const auto& a2, const auto& a1, const auto& b1,
                     const auto& b2, const auto& b3, auto& self) -> void {
    if constexpr (std::is_arithmetic_v<std::decay_t<decltype(o)>>) {
      o = (45.0 * (a1 - b1) - 9.0 * (a2 - b2) + (a3 - b3)) / (60.0 * h);
    } else {
      for (std::size_t i = 0; i < o.size(); ++i) self(o[i], a3[i], a2[i], a1[i], b1[i], b2[i], b3[i], self);
    }
  };
  combine(out, p3, p2, p1, m1, m2, m3, combine);
  return out;
}

/// Step for the nested stencils: at most room/8 so both 3h reaches stay in
/// the chart (r in (0,1), theta in (0,pi)), and scaled by the room itself
/// because the metric coefficients vary on that length scale near the edges.
template <class M>
double adapted_step(const Vec<M::dim>& x, double h) {
  double room = 1e300;
  if constexpr (M::dim == 3) room = std::min({room, x[0], 1.0 - x[0]});
  room = std::min({room, x[M::theta_index], pi - x[M::theta_index]});
  if (!(room > 0.0)) throw DomainError("point lies on the chart boundary");
  return std::min(h, room / 8.0) * std::min(1.0, room);
}

}  // namespace detail

/// Gamma^k_ij = (1/2) g^{kl} (d_i g_lj + d_j g_il - d_l g_ij) for a given
/// metric derivative array dg[l][i][j] = d_l g_ij.
template <int D>
Rank3<D> christoffel_from_metric(const Mat<D>& g, const Rank3<D>& dg) {
  const Mat<D> ginv = inverse<D>(g);
  Rank3<D> gamma{};
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0.0;
        for (int l = 0; l < D; ++l) s += ginv[k][l] * (dg[i][l][j] + dg[j][i][l] - dg[l][i][j]);
        gamma[k][i][j] = 0.5 * s;
      }
  return gamma;
}

template <class M>
Rank3<M::dim> christoffel_numeric_at(const Vec<M::dim>& x, double h = 1e-4) {
  constexpr int D = M::dim;
  const double step = detail::adapted_step<M>(x, h);
  Rank3<D> dg{};
  for (int l = 0; l < D; ++l)
    dg[l] = detail::central_difference<D>([](const Vec<D>& y) { return M::metric(y); }, x, l, step);
  return christoffel_from_metric<D>(M::metric(x), dg);
}

/// Riemann tensor R^a_{m n r} = d_n G^a_{mr} - d_r G^a_{mn} + G^a_{bn} G^b_{mr}
/// - G^a_{br} G^b_{mn}, from Christoffels and their gradient [k][i][j][l].
template <int D>
Rank4<D> riemann_mixed(const Rank3<D>& G, const Rank4<D>& dG) {
  Rank4<D> R{};
  for (int a = 0; a < D; ++a)
    for (int m = 0; m < D; ++m)
      for (int n = 0; n < D; ++n)
        for (int r = 0; r < D; ++r) {
          double v = dG[a][m][r][n] - dG[a][m][n][r];
          for (int b = 0; b < D; ++b) v += G[a][b][n] * G[b][m][r] - G[a][b][r] * G[b][m][n];
          R[a][m][n][r] = v;
        }
  return R;
}

template <int D>
Rank4<D> lower_first(const Mat<D>& g, const Rank4<D>& R) {
  Rank4<D> L{};
  for (int a = 0; a < D; ++a)
    for (int m = 0; m < D; ++m)
      for (int n = 0; n < D; ++n)
        for (int r = 0; r < D; ++r) {
          double v = 0.0;
          for (int b = 0; b < D; ++b) v += g[a][b] * R[b][m][n][r];
          L[a][m][n][r] = v;
        }
  return L;
}

/// R_mn = d_a G^a_mn - d_n G^a_ma + G^a_mn G^b_ab - G^c_ma G^a_nc.
template <int D>
Mat<D> ricci_from_christoffel(const Rank3<D>& G, const Rank4<D>& dG) {
  Mat<D> R{};
  for (int m = 0; m < D; ++m)
    for (int n = 0; n < D; ++n) {
      double v = 0.0;
      for (int a = 0; a < D; ++a) {
        v += dG[a][m][n][a] - dG[a][m][a][n];
        for (int b = 0; b < D; ++b) v += G[a][m][n] * G[b][a][b] - G[b][m][a] * G[a][n][b];
      }
      R[m][n] = v;
    }
  return R;
}

struct CurvatureReport {
  MetricKind kind{};
  int dim = 0;
  Rank3<3> christoffels{};
  Mat<3> metric{};
  Mat<3> ricci{};
  /// Fully lowered R_{abcd}.
  Rank4<3> riemann{};
  double scalar = 0.0;
  /// Keyed by ordered distinct frame pairs.
  std::map<std::pair<FrameAxis, FrameAxis>, double> sectionals;
};

enum class CurvatureRoute { Analytic, FiniteDifference };

namespace detail {

template <class M>
CurvatureReport assemble_report(const Vec<M::dim>& x, const Rank3<M::dim>& G,
                                const Rank4<M::dim>& dG, SignConvention sign) {
  constexpr int D = M::dim;
  const Mat<D> g = M::metric(x);
  const Mat<D> ginv = inverse<D>(g);
  const Rank4<D> low = lower_first<D>(g, riemann_mixed<D>(G, dG));
  const Mat<D> ric = ricci_from_christoffel<D>(G, dG);
  const double flip = sign == SignConvention::Paper ? 1.0 : -1.0;

  CurvatureReport rep;
  rep.kind = M::kind;
  rep.dim = D;
  double scalar = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      rep.metric[i][j] = g[i][j];
      rep.ricci[i][j] = flip * ric[i][j];
      scalar += ginv[i][j] * ric[i][j];
      for (int k = 0; k < D; ++k) {
        rep.christoffels[i][j][k] = G[i][j][k];
        for (int l = 0; l < D; ++l) rep.riemann[i][j][k][l] = flip * low[i][j][k][l];
      }
    }
  rep.scalar = flip * scalar;

  std::vector<FrameAxis> axes;
  if (D == 3) axes.push_back(FrameAxis::R);
  axes.push_back(FrameAxis::Theta);
  axes.push_back(FrameAxis::Phi);
  for (FrameAxis a : axes)
    for (FrameAxis b : axes) {
      if (a == b) continue;
      const int i = axis_index(M::kind, a), j = axis_index(M::kind, b);
      // Frame vectors are coordinate vectors over their scale factors.
      const double denom = g[i][i] * g[j][j] - g[i][j] * g[i][j];
      rep.sectionals[{a, b}] = flip * low[i][j][i][j] / denom;
    }
  return rep;
}

template <class M>
Rank4<M::dim> christoffel_gradient_numeric(const Vec<M::dim>& x, double h) {
  constexpr int D = M::dim;
  const double step = detail::adapted_step<M>(x, 4.0 * h);
  Rank4<D> dG{};
  for (int l = 0; l < D; ++l) {
    const Rank3<D> part = central_difference<D>(
        [&](const Vec<D>& y) { return christoffel_numeric_at<M>(y, h); }, x, l, step);
    for (int k = 0; k < D; ++k)
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) dG[k][i][j][l] = part[k][i][j];
  }
  return dG;
}

}  // namespace detail

inline Rank3<3> christoffel(MetricKind kind, const BlochPoint& point) {
  return visit_metric(kind, [&]<class M>(M) {
    const auto G = M::christoffel(M::coordinates(point));
    Rank3<3> out{};
    for (int k = 0; k < M::dim; ++k)
      for (int i = 0; i < M::dim; ++i)
        for (int j = 0; j < M::dim; ++j) out[k][i][j] = G[k][i][j];
    return out;
  });
}

inline Rank3<3> christoffel_numeric(MetricKind kind, const BlochPoint& point, double h = 1e-4) {
  return visit_metric(kind, [&]<class M>(M) {
    const auto G = christoffel_numeric_at<M>(M::coordinates(point), h);
    Rank3<3> out{};
    for (int k = 0; k < M::dim; ++k)
      for (int i = 0; i < M::dim; ++i)
        for (int j = 0; j < M::dim; ++j) out[k][i][j] = G[k][i][j];
    return out;
  });
}

template <class M>
CurvatureReport curvature_report_at(const Vec<M::dim>& x, CurvatureRoute route,
                                    SignConvention sign = SignConvention::Paper,
                                    double h = 3e-3) {
  if (route == CurvatureRoute::Analytic)
    return detail::assemble_report<M>(x, M::christoffel(x), M::christoffel_gradient(x), sign);
  return detail::assemble_report<M>(x, christoffel_numeric_at<M>(x, h),
                                    detail::christoffel_gradient_numeric<M>(x, h), sign);
}

inline CurvatureReport curvature_report(MetricKind kind, const BlochPoint& point,
                                        CurvatureRoute route = CurvatureRoute::Analytic,
                                        SignConvention sign = SignConvention::Paper) {
  return visit_metric(kind, [&]<class M>(M) {
    return curvature_report_at<M>(M::coordinates(point), route, sign);
  });
}

inline double sectional_curvature(MetricKind kind, const BlochPoint& point, TangentPlane plane) {
  if (plane.first == plane.second) throw std::invalid_argument("plane axes must differ");
  detail::axis_index(kind, plane.first);
  detail::axis_index(kind, plane.second);
  return curvature_report(kind, point).sectionals.at({plane.first, plane.second});
}

struct MaximalSymmetryPoint {
  double k_estimate = 0.0;      ///< R / (n(n-1))
  double sectional_spread = 0.0;  ///< max - min over frame planes
  double scalar_residual = 0.0;   ///< |R - n(n-1)K|
  double ricci_residual = 0.0;    ///< max |R_ab - (n-1)K g_ab|
  double riemann_residual = 0.0;  ///< max |R_abcd - K(g_ac g_bd - g_ad g_bc)|
  std::vector<std::string> failing_ricci;
};

struct MaximalSymmetryReport {
  MetricKind kind{};
  int n = 0;
  std::vector<MaximalSymmetryPoint> points;
  double k_variation = 0.0;  ///< spread of K across the sample points
  bool isotropic = false;
  bool ricci_relation = false;
  bool riemann_relation = false;
  bool holds() const { return isotropic && ricci_relation && riemann_relation; }
};

/// Tests R = n(n-1)K, R_ab = (n-1)K g_ab and the constant-curvature form of
/// R_abcd at each sample point, with K taken from the scalar.
inline MaximalSymmetryReport maximal_symmetry_check(MetricKind kind,
                                                    std::span<const BlochPoint> samples,
                                                    double tol = 1e-8) {
  if (samples.size() < 2) throw std::invalid_argument("need at least two sample points");
  MaximalSymmetryReport rep;
  rep.kind = kind;
  const int n = dimension(kind);
  rep.n = n;
  rep.isotropic = rep.ricci_relation = rep.riemann_relation = true;
  double kmin = 1e300, kmax = -1e300;
  const char* names[3] = {"r", "theta", "phi"};
  for (const auto& p : samples) {
    const CurvatureReport c = curvature_report(kind, p);
    MaximalSymmetryPoint mp;
    const double K = c.scalar / (n * (n - 1));
    mp.k_estimate = K;
    kmin = std::min(kmin, K);
    kmax = std::max(kmax, K);
    double smin = 1e300, smax = -1e300;
    for (const auto& [plane, v] : c.sectionals) {
      smin = std::min(smin, v);
      smax = std::max(smax, v);
    }
    mp.sectional_spread = smax - smin;
    double kmean = 0.0;
    for (const auto& [plane, v] : c.sectionals) kmean += v;
    kmean /= static_cast<double>(c.sectionals.size());
    mp.scalar_residual = std::abs(c.scalar - n * (n - 1) * kmean);
    const auto& g = c.metric;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double res = std::abs(c.ricci[a][b] - (n - 1) * K * g[a][b]);
        mp.ricci_residual = std::max(mp.ricci_residual, res);
        if (a == b && res > tol) {
          const int label = n == 3 ? a : a + 1;
          mp.failing_ricci.push_back(std::string("R_") + names[label] + names[label]);
        }
        for (int cc = 0; cc < n; ++cc)
          for (int d = 0; d < n; ++d) {
            const double model = K * (g[a][cc] * g[b][d] - g[a][d] * g[b][cc]);
            mp.riemann_residual = std::max(mp.riemann_residual, std::abs(c.riemann[a][b][cc][d] - model));
          }
      }
    if (mp.sectional_spread > tol || mp.scalar_residual > tol) rep.isotropic = false;
    if (mp.ricci_residual > tol) rep.ricci_relation = false;
    if (mp.riemann_residual > tol) rep.riemann_relation = false;
    rep.points.push_back(std::move(mp));
  }
  rep.k_variation = kmax - kmin;
  if (rep.k_variation > tol) rep.isotropic = false;
  return rep;
}

/// Linear combination a1 k1 + a2 k2 + a3 k3 of the rotation Killing fields of
/// the unit sphere d theta^2 + sin^2 theta d phi^2.
struct KillingField {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

inline constexpr KillingField killing_k1{1.0, 0.0, 0.0};
inline constexpr KillingField killing_k2{0.0, 1.0, 0.0};
inline constexpr KillingField killing_k3{0.0, 0.0, 1.0};

namespace detail {

/// Lowered components k_sigma and their derivatives d_rho k_sigma ([rho][sigma]).
inline std::pair<Vec<2>, Mat<2>> killing_covector(const KillingField& f, double th, double ph) {
  const double s = std::sin(th), c = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  const double c2 = std::cos(2.0 * th);
  Vec<2> k{f.a1 * sp - f.a2 * cp, f.a1 * s * c * cp + f.a2 * s * c * sp - f.a3 * s * s};
  Mat<2> dk{};
  dk[0][0] = 0.0;
  dk[1][0] = f.a1 * cp + f.a2 * sp;
  dk[0][1] = f.a1 * c2 * cp + f.a2 * c2 * sp - f.a3 * 2.0 * s * c;
  dk[1][1] = -f.a1 * s * c * sp + f.a2 * s * c * cp;
  return {k, dk};
}

}  // namespace detail

/// Max over the grid of |D_rho k_sigma + D_sigma k_rho|, with Christoffels of
/// the unit-sphere metric (4 times the Fubini-Study metric).
inline double killing_check(const KillingField& field, std::span<const double> thetas,
                            std::span<const double> phis) {
  double worst = 0.0;
  for (double th : thetas) {
    if (std::abs(std::sin(th)) < 1e-6) throw DomainError("Killing grid touches a pole");
    for (double ph : phis) {
      const auto G = BlochSphereMetric::christoffel({th, ph});
      const auto [k, dk] = detail::killing_covector(field, th, ph);
      Mat<2> D{};
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
          double v = dk[r][s];
          for (int l = 0; l < 2; ++l) v -= G[l][s][r] * k[l];
          D[r][s] = v;
        }
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) worst = std::max(worst, std::abs(D[r][s] + D[s][r]));
    }
  }
  return worst;
}

}  // namespace qgeo
