#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qgeo {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Raised when an argument leaves the domain on which a formula is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a closed-form curve is evaluated outside its validity window.
class WindowError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class BranchMode { Principal, Unwrapped };

enum class MetricKind { FubiniStudy, Sjoqvist, Bures, BlochSphere };

constexpr int dimension(MetricKind kind) {
  return (kind == MetricKind::FubiniStudy || kind == MetricKind::BlochSphere) ? 2 : 3;
}

constexpr bool has_radial_coordinate(MetricKind kind) { return dimension(kind) == 3; }

inline std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::FubiniStudy: return "fs";
    case MetricKind::Sjoqvist: return "sjoqvist";
    case MetricKind::Bures: return "bures";
    case MetricKind::BlochSphere: return "bsm";
  }
  return "unknown";
}

inline std::string_view to_string(BranchMode mode) {
  return mode == BranchMode::Principal ? "principal" : "unwrapped";
}

inline MetricKind parse_metric_kind(std::string_view name) {
  if (name == "fs") return MetricKind::FubiniStudy;
  if (name == "sjoqvist") return MetricKind::Sjoqvist;
  if (name == "bures") return MetricKind::Bures;
  if (name == "bsm") return MetricKind::BlochSphere;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

inline BranchMode parse_branch_mode(std::string_view name) {
  if (name == "principal") return BranchMode::Principal;
  if (name == "unwrapped") return BranchMode::Unwrapped;
  throw std::invalid_argument("unknown branch '" + std::string(name) + "'");
}

inline int sign_or_one(double x) { return x < 0.0 ? -1 : 1; }

/// Reduces an angle into [0, 2pi).
inline double wrap_two_pi(double phi) {
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

/// arctan(k tan u) on the principal branch, in [-pi/2, pi/2].
inline double arctan_k_tan(double k, double u) {
  double c = std::cos(u);
  double s = std::sin(u);
  if (c < 0.0) {
    c = -c;
    s = -s;
  }
  return std::atan2(k * s, c);
}

/// Continuous continuation of arctan(k tan u) in u, agreeing with the
/// principal branch on (-pi/2, pi/2). For k == 0 the value is a staircase
/// with jumps of +pi, which is the limit k -> 0+.
inline double arctan_k_tan_unwrapped(double k, double u) {
  if (k == 0.0) return pi * std::floor((u + pi / 2.0) / pi);
  const double j = std::floor((u + pi) / two_pi);
  const double v = u - two_pi * j;
  return std::atan2(k * std::sin(v), std::cos(v)) + (k > 0.0 ? 1.0 : -1.0) * two_pi * j;
}

inline double arctan_k_tan(double k, double u, BranchMode mode) {
  return mode == BranchMode::Principal ? arctan_k_tan(k, u) : arctan_k_tan_unwrapped(k, u);
}

}  // namespace qgeo
