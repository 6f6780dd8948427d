#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <span>
#include <vector>

namespace qgeo {

/// Adaptive Gauss-Kronrod on a smooth finite interval.
/// `tol` is relative to the L1 norm of the integrand; refinement depth is
/// capped so an unreachable tolerance cannot blow up the cost.
template <class F>
double integrate(F f, double a, double b, double tol = 1e-12, unsigned max_depth = 12) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol);
}

/// Integrates over [a, b] split at the given interior points (kinks or jumps).
template <class F>
double integrate_piecewise(F f, double a, double b, std::span<const double> breaks,
                           double tol = 1e-12) {
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate(f, cuts[i], cuts[i + 1], tol);
  return sum;
}

/// Double-exponential rule for integrands with endpoint singularities.
template <class F>
double integrate_singular(F f, double a, double b, double tol = 1e-14) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(f, a, b, tol);
}

}  // namespace qgeo
