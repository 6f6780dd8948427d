#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qgeo/tensor.hpp"

namespace qgeo {

template <int N>
struct OdeTrajectory {
  std::vector<double> t;
  std::vector<Vec<N>> y;
  /// Parameter at which the boundary function first reached zero, if it did.
  std::optional<double> event;
};

template <int N, class Rhs>
Vec<N> rk4_step(Rhs& f, const Vec<N>& y, double t, double h) {
  auto axpy = [](const Vec<N>& a, double s, const Vec<N>& b) {
    Vec<N> out;
    for (int i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const Vec<N> k1 = f(t, y);
  const Vec<N> k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const Vec<N> k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const Vec<N> k4 = f(t + h, axpy(y, h, k3));
  Vec<N> out;
  for (int i = 0; i < N; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Classical RK4 from t0 to t1, sampled every `h`. `margin(y)` is positive
/// inside the domain. A step fails when it leaves the domain, the right-hand
/// side throws, or it disagrees with two half steps by more than `local_tol`
/// (near a coordinate singularity a stage can throw the state to an arbitrary
/// point that is still inside). A failed step is halved and retried; once it
/// would drop below `event_tol` the trajectory ends there with an event.
template <int N, class Rhs, class Margin>
OdeTrajectory<N> rk4_integrate(Rhs f, const Vec<N>& y0, double t0, double t1, double h,
                               Margin margin, double event_tol = 1e-10, double local_tol = 1e-8) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t1 >= t0)) throw std::invalid_argument("integration span must be nondecreasing");
  OdeTrajectory<N> out;
  out.t.push_back(t0);
  out.y.push_back(y0);
  if (!(margin(y0) > 0.0)) {
    out.event = t0;
    return out;
  }
  auto try_step = [&](const Vec<N>& y, double t, double s) -> std::optional<Vec<N>> {
    try {
      const Vec<N> next = rk4_step<N>(f, y, t, s);
      const Vec<N> half = rk4_step<N>(f, rk4_step<N>(f, y, t, 0.5 * s), t + 0.5 * s, 0.5 * s);
      for (int i = 0; i < N; ++i) {
        if (!std::isfinite(next[i])) return std::nullopt;
        if (!(std::abs(next[i] - half[i]) <= local_tol * (1.0 + std::abs(half[i])))) return std::nullopt;
      }
      if (!(margin(half) > 0.0)) return std::nullopt;
      return half;
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / h - 1e-9));
  Vec<N> y = y0;
  double t = t0;
  for (long n = 0; n < steps; ++n) {
    const double target = (n + 1 == steps) ? t1 : t0 + static_cast<double>(n + 1) * h;
    double s = target - t;
    while (t < target) {
      s = std::min(s, target - t);
      if (auto next = try_step(y, t, s)) {
        y = *next;
        t = (s == target - t) ? target : t + s;
        s *= 2.0;
        continue;
      }
      s *= 0.5;
      if (s < event_tol) {
        if (t > out.t.back()) {
          out.t.push_back(t);
          out.y.push_back(y);
        }
        out.event = t;
        return out;
      }
    }
    out.t.push_back(t);
    out.y.push_back(y);
  }
  return out;
}

}  // namespace qgeo
