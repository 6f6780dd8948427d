#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgeo/qgeo.hpp"

namespace qgeo::cli {

inline constexpr const char* version = "0.1.0";

enum class Command { Curvature, Geodesic, Length, Volume, Complexity, Compare, Verify };
enum class Format { Csv, Json };

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain = 2;
inline constexpr int exit_verification = 3;

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::Curvature: return "curvature";
    case Command::Geodesic: return "geodesic";
    case Command::Length: return "length";
    case Command::Volume: return "volume";
    case Command::Complexity: return "complexity";
    case Command::Compare: return "compare";
    case Command::Verify: return "verify";
  }
  return "?";
}

inline Command parse_command(std::string_view s) {
  for (Command c : {Command::Curvature, Command::Geodesic, Command::Length, Command::Volume,
                    Command::Complexity, Command::Compare, Command::Verify})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown command: " + std::string(s));
}

struct RunConfig {
  Command command = Command::Curvature;
  MetricKind metric = MetricKind::FubiniStudy;
  double r0 = 0.3;
  double theta0 = pi / 2.0;
  double phi0 = 0.0;
  double rdot0 = 0.2;
  double thetadot0 = -0.8;
  double phidot0 = 0.6;
  double eta_max = 1.0;
  double tau_max = 100.0;
  int grid = 50;
  BranchMode branch = BranchMode::Principal;
  Format format = Format::Csv;
  std::uint64_t seed = 7;
  bool accessible = false;
  std::string out;
};

struct Record {
  double eta_or_tau;
  double value;
  std::string metric;
  std::string quantity;
  std::string branch;
};

namespace detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Symbol suffix used in quantity names (L_FS, C_Sj, ...).
inline std::string symbol(MetricKind k) {
  switch (k) {
    case MetricKind::FubiniStudy: return "FS";
    case MetricKind::Sjoqvist: return "Sj";
    case MetricKind::Bures: return "B";
    case MetricKind::BlochSphere: return "BSM";
  }
  return "?";
}

inline std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  if (!(hi > 0.0)) throw std::invalid_argument("grid end must be positive");
  std::vector<double> g;
  for (int i = 1; i <= n; ++i) g.push_back(lo + (hi - lo) * i / n);
  return g;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("log grid needs at least two points");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

inline GeodesicSpec spec_from(const RunConfig& c) {
  GeodesicSpec s;
  s.kind = c.metric;
  s.theta = c.theta0;
  s.phi = c.phi0;
  s.theta_dot = c.thetadot0;
  s.phi_dot = c.phidot0;
  if (has_radial_coordinate(c.metric)) {
    s.r = c.r0;
    s.r_dot = c.rdot0;
  }
  return s;
}

inline BlochPoint point_from(const RunConfig& c) {
  return {has_radial_coordinate(c.metric) ? c.r0 : 1.0, c.theta0, c.phi0};
}

/// Closed form when the metric has one for this initial data, otherwise an
/// RK4 trajectory on [0, eta_max].
inline GeodesicCurve curve_from(const RunConfig& c, double eta_max) {
  const GeodesicSpec s = spec_from(c);
  if (c.metric == MetricKind::Bures && (s.phi_dot != 0.0 || s.theta_dot == 0.0))
    return integrate_geodesic(s, eta_max);
  return closed_form_geodesic(s);
}

struct Emitter {
  const RunConfig& cfg;
  std::vector<Record> rows;

  void add(double x, double v, std::string quantity, std::optional<MetricKind> kind = std::nullopt) {
    rows.push_back({x, v, std::string(qgeo::to_string(kind.value_or(cfg.metric))), std::move(quantity),
                    std::string(qgeo::to_string(cfg.branch))});
  }
};

// ------------------------------------------------------------ commands

inline void run_curvature(Emitter& e) {
  const RunConfig& c = e.cfg;
  const CurvatureReport rep = curvature_report(c.metric, point_from(c));
  e.add(0.0, rep.scalar, "R");
  for (const auto& [plane, k] : rep.sectionals) {
    if (plane.first > plane.second) continue;
    e.add(0.0, k, "K_" + std::string(to_string(plane.first)) + "_" + std::string(to_string(plane.second)));
  }
}

inline void run_geodesic(Emitter& e) {
  const RunConfig& c = e.cfg;
  const GeodesicSpec s = spec_from(c);
  const int dim = dimension(c.metric);
  const std::vector<std::string> names =
      dim == 3 ? std::vector<std::string>{"r", "theta", "phi"} : std::vector<std::string>{"theta", "phi"};
  double end = c.eta_max, window = infinity;
  std::optional<GeodesicCurve> closed;
  try {
    closed = closed_form_geodesic(s);
    window = qgeo::detail::closed_form_window_end(*closed);
    end = std::min(end, window);
    e.add(0.0, window, "eta_window");
  } catch (const DomainError&) {
    if (c.metric != MetricKind::Bures) throw;
  }
  const int n = std::max(c.grid, 1);
  const double spacing = end / n;
  const int sub = std::max(1, static_cast<int>(std::ceil(spacing / 1e-3)));
  StepControl ctl;
  ctl.step = spacing / sub;
  const NumericGeodesic num = integrate_geodesic(s, end, ctl);
  for (int i = 0; i <= n; ++i) {
    const double eta = spacing * i;
    if (closed && eta < window) {
      auto x = closed_form_state(*closed, eta).first;
      if (c.branch == BranchMode::Principal) x[dim - 1] = wrap_two_pi(x[dim - 1]);
      for (int k = 0; k < dim; ++k) e.add(eta, x[k], names[k]);
    }
    const std::size_t idx = static_cast<std::size_t>(i) * sub;
    if (idx < num.eta.size()) {
      auto x = num.position[idx];
      if (c.branch == BranchMode::Principal) x[dim - 1] = wrap_two_pi(x[dim - 1]);
      for (int k = 0; k < dim; ++k) e.add(num.eta[idx], x[k], names[k] + "_rk4");
    }
  }
  if (num.boundary_event) e.add(*num.boundary_event, *num.boundary_event, "eta_boundary_rk4");
}

inline double curve_end(const GeodesicCurve& curve, double eta_max) {
  return std::min(eta_max, qgeo::detail::closed_form_window_end(curve));
}

inline void run_length(Emitter& e) {
  const RunConfig& c = e.cfg;
  const GeodesicCurve curve = curve_from(c, c.eta_max);
  const double end = curve_end(curve, c.eta_max);
  for (double eta : linear_grid(0.0, end, c.grid))
    e.add(eta, path_length(c.metric, curve, eta), "L_" + symbol(c.metric));
}

inline void run_volume(Emitter& e) {
  const RunConfig& c = e.cfg;
  if (c.accessible) {
    e.add(0.0, accessible_volume(c.metric), "V_acc_" + symbol(c.metric));
    e.add(0.0, accessible_volume_quadrature(c.metric), "V_acc_" + symbol(c.metric) + "_quadrature");
    return;
  }
  const GeodesicCurve curve = curve_from(c, c.eta_max);
  const double end = curve_end(curve, c.eta_max);
  for (double eta : linear_grid(0.0, end, c.grid)) {
    const ExploredVolume v = explored_volume(c.metric, curve, eta, c.branch);
    e.add(eta, v.magnitude, "V_" + symbol(c.metric));
    e.add(eta, v.orientation, "V_" + symbol(c.metric) + "_orientation");
  }
}

inline void run_complexity(Emitter& e) {
  const RunConfig& c = e.cfg;
  const GeodesicCurve curve = curve_from(c, c.tau_max);
  const auto grid = linear_grid(0.0, c.tau_max, c.grid);
  const ComplexityTrace t = complexity_trace(c.metric, curve, grid, c.branch);
  for (std::size_t i = 0; i < t.tau.size(); ++i) {
    e.add(t.tau[i], t.complexity[i], "C_" + symbol(c.metric));
    e.add(t.tau[i], t.entropy[i].value_or(nan), "S_" + symbol(c.metric));
  }
  if (c.metric != MetricKind::Sjoqvist) return;
  // Fitted laws for the matched equatorial pair; c_FS is taken from phidot0.
  const ComplexityParams p{c.r0, c.rdot0, c.phidot0, c.phi0};
  const auto fit_grid = log_grid(c.tau_max / 100.0, c.tau_max, std::max(c.grid, 2));
  const AsymptoticLaw law = asymptotic_ratio(p, fit_grid, fit_grid.front(), fit_grid.back());
  for (std::size_t i = 0; i < law.tau.size(); ++i)
    e.add(law.tau[i], law.ratio_over_tau[i], "ratio_C_Sj_C_FS_over_tau");
  e.add(c.tau_max, law.ratio_limit, "ratio_limit");
  e.add(c.tau_max, law.ige_gap_slope_leading, "S_gap_slope_leading");
  e.add(c.tau_max, law.ige_gap_slope_averaged, "S_gap_slope_averaged");
  e.add(c.tau_max, law.ige_gap_slope, "S_gap_slope_pointwise");
}

inline void run_compare(Emitter& e) {
  const RunConfig& c = e.cfg;
  const ComparisonParams p{c.r0, c.rdot0, c.phidot0, c.theta0, c.thetadot0};
  const auto grid = linear_grid(0.0, c.eta_max, c.grid);
  const OrderingReport rep = volume_ratio_comparison(p, grid);
  const auto sj = MetricKind::Sjoqvist;
  for (const auto& s : rep.compare.samples) {
    e.add(s.eta, s.lhs, "V_Sj_over_acc", sj);
    e.add(s.eta, s.rhs, "V_FS_over_acc", MetricKind::FubiniStudy);
  }
  for (const auto& s : rep.boys.samples) {
    e.add(s.eta, s.lhs, "V_Sj_slice_over_acc", sj);
    e.add(s.eta, s.rhs, "V_B_slice_over_acc", MetricKind::Bures);
  }
  e.add(c.eta_max, rep.compare.eta_star.value_or(nan), "eta_star_compare", sj);
  e.add(c.eta_max, rep.boys.eta_star.value_or(nan), "eta_star_boys", sj);
  const SjoqvistRadial rad(c.r0, c.rdot0);
  const double rp = c.rdot0 / c.thetadot0;
  for (double eta : grid) {
    const double theta_f = std::abs(c.thetadot0) * eta;
    const double r_f = std::abs(std::sin(rad.alpha(eta)));
    e.add(eta, fs_length(theta_f), "L_FS", MetricKind::FubiniStudy);
    e.add(eta, sjoqvist_length(c.r0, r_f, theta_f), "L_Sj_r_theta", sj);
    e.add(eta, sjoqvist_length_eta(c.r0, rp, c.thetadot0, eta), "L_Sj", sj);
    e.add(eta, bures_length(c.r0, rp, c.thetadot0, eta), "L_B", MetricKind::Bures);
  }
}

// ------------------------------------------------------------ verify

struct Check {
  std::string name;
  std::string metric;
  double residual;
  double tolerance;
  bool passed() const { return residual <= tolerance; }
};

/// Tolerance from QGEO_TOL when set, else the default.
inline double tolerance(double fallback) {
  if (const char* env = std::getenv("QGEO_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v >= 0.0) return v;
  }
  return fallback;
}

inline std::vector<Check> verification_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Check> out;
  const MetricKind qubit[] = {MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures};

  for (MetricKind k : qubit) {
    double scalar = 0.0, sectional = 0.0, fd = 0.0;
    for (int i = 0; i < 20; ++i) {
      const BlochPoint p = random_interior_point(k, rng);
      const CurvatureReport rep = curvature_report(k, p);
      scalar = std::max(scalar, curvature_deviation(rep.scalar, expected_scalar_curvature(k)));
      for (const auto& [plane, v] : rep.sectionals)
        sectional = std::max(sectional, curvature_deviation(v, expected_sectional(k, plane.first, plane.second)));
      if (i < 3)
        fd = std::max(fd, std::abs(curvature_report(k, p, CurvatureRoute::FiniteDifference).scalar -
                                   expected_scalar_curvature(k)));
    }
    const std::string m(qgeo::to_string(k));
    out.push_back({"scalar_curvature", m, scalar, tolerance(1e-12)});
    out.push_back({"sectional_curvature", m, sectional, tolerance(1e-12)});
    out.push_back({"scalar_curvature_finite_difference", m, fd, tolerance(1e-5)});
  }

  for (MetricKind k : {MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures, MetricKind::BlochSphere})
    out.push_back({"accessible_volume", std::string(qgeo::to_string(k)),
                   std::abs(accessible_volume_quadrature(k) - accessible_volume(k)), tolerance(1e-8)});

  for (MetricKind k : qubit) {
    double dev = 0.0, drift = 0.0;
    for (int i = 0; i < 10; ++i) {
      const GeodesicSpec s = random_geodesic_spec(k, rng);
      dev = std::max(dev, geodesic_oracle_deviation(s, 2.0).sup_norm);
      drift = std::max(drift, conserved_drift(s, 2.0).max());
    }
    const std::string m(qgeo::to_string(k));
    out.push_back({"geodesic_rk4_vs_closed_form", m, dev, tolerance(1e-6)});
    out.push_back({"conserved_quantity_drift", m, drift, tolerance(1e-9)});
  }

  double spectral = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BlochPoint p = random_interior_point(MetricKind::Bures, rng);
    const double d[3] = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double exact = line_element(MetricKind::Bures, p, d);
    spectral = std::max(spectral, std::abs(bures_from_spectral(p, d) - exact) / exact);
  }
  out.push_back({"bures_spectral_sum", "bures", spectral, tolerance(1e-6)});

  double ine1 = 0.0, amo2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double ri = uniform(rng, 0.01, 1.0), rf = uniform(rng, 0.01, 1.0), th = uniform(rng, 0.01, pi);
    ine1 = std::max(ine1, fs_length(th) - sjoqvist_length(ri, rf, th));
    const double r = uniform(rng, 0.0, 0.99), rp = uniform(rng, -2, 2), td = uniform(rng, -2, 2),
                 eta = uniform(rng, 0.0, 5.0);
    amo2 = std::max(amo2, bures_length(r, rp, td, eta) - sjoqvist_length_eta(r, rp, td, eta));
  }
  out.push_back({"length_fs_le_sjoqvist", "sjoqvist", std::max(ine1, 0.0), tolerance(0.0)});
  out.push_back({"length_bures_le_sjoqvist", "bures", std::max(amo2, 0.0), tolerance(0.0)});

  {
    const ComplexityParams p{uniform(rng, 0.0, 0.8), uniform(rng, 0.1, 0.9), uniform(rng, 0.1, 0.9), 0.0};
    const auto grid = log_grid(1e2, 1e4, 40);
    const AsymptoticLaw law = asymptotic_ratio(p, grid);
    out.push_back({"complexity_ratio_linearity", "sjoqvist", law.ratio_spread, tolerance(1e-12)});
    out.push_back({"complexity_ratio_limit", "sjoqvist", law.ratio_max_error, tolerance(1e-10)});
    const GeodesicCurve curve = sjoqvist_geodesic(p.sjoqvist_spec());
    double rel = 0.0;
    for (double tau : {0.7, 1.3, 2.9}) {
      const double closed = igc_sjoqvist_closed(p.c_fs, p.omega(), tau);
      const double quad = igc(MetricKind::Sjoqvist, curve, tau, BranchMode::Principal, WindowPolicy::Continue);
      rel = std::max(rel, std::abs(closed - quad) / std::abs(closed));
    }
    out.push_back({"complexity_closed_vs_quadrature", "sjoqvist", rel, tolerance(1e-6)});
  }

  double mcp_b = 0.0, mcp_s = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BlochPoint p = random_interior_point(MetricKind::Bures, rng);
    const double d[3] = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    mcp_b = std::max(mcp_b, std::abs(mcp_metric(MCPFunction::Bures, p, d) - line_element(MetricKind::Bures, p, d)));
    mcp_s = std::max(mcp_s,
                     std::abs(mcp_metric(MCPFunction::Sjoqvist, p, d) - line_element(MetricKind::Sjoqvist, p, d)));
  }
  out.push_back({"mcp_reconstruction", "bures", mcp_b, tolerance(1e-12)});
  out.push_back({"mcp_reconstruction", "sjoqvist", mcp_s, tolerance(1e-12)});

  std::vector<double> th, ph;
  for (int i = 0; i < 20; ++i) {
    th.push_back(0.1 + (pi - 0.2) * i / 19.0);
    ph.push_back(two_pi * i / 20.0);
  }
  double killing = 0.0;
  for (const KillingField& f : {killing_k1, killing_k2, killing_k3,
                                KillingField{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)}})
    killing = std::max(killing, killing_check(f, th, ph));
  out.push_back({"killing_residual", "bsm", killing, tolerance(1e-8)});
  return out;
}

inline std::vector<Check> run_verify(Emitter& e) {
  const auto checks = verification_suite(e.cfg.seed);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    e.rows.push_back({static_cast<double>(i), c.residual, c.metric, c.name, std::string(qgeo::to_string(e.cfg.branch))});
    e.rows.push_back({static_cast<double>(i), c.tolerance, c.metric, c.name + "_tol",
                      std::string(qgeo::to_string(e.cfg.branch))});
  }
  return checks;
}

// ------------------------------------------------------------ output

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<Record>& rows) {
  os << "eta_or_tau,value,metric,quantity,branch\n";
  for (const auto& r : rows)
    os << format_double(r.eta_or_tau) << ',' << format_double(r.value) << ',' << r.metric << ','
       << r.quantity << ',' << r.branch << '\n';
}

inline nlohmann::json config_json(const RunConfig& c) {
  return {{"command", to_string(c.command)},
          {"metric", qgeo::to_string(c.metric)},
          {"r0", c.r0},
          {"theta0", c.theta0},
          {"phi0", c.phi0},
          {"rdot0", c.rdot0},
          {"thetadot0", c.thetadot0},
          {"phidot0", c.phidot0},
          {"eta_max", c.eta_max},
          {"tau_max", c.tau_max},
          {"grid", c.grid},
          {"branch", qgeo::to_string(c.branch)},
          {"accessible", c.accessible}};
}

inline void write_json(std::ostream& os, const RunConfig& c, const std::vector<Record>& rows) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"eta_or_tau", r.eta_or_tau}, {"metric", r.metric}, {"quantity", r.quantity},
                     {"branch", r.branch}};
    // NaN has no JSON spelling; undefined values become null.
    j["value"] = std::isnan(r.value) ? nlohmann::json(nullptr) : nlohmann::json(r.value);
    recs.push_back(std::move(j));
  }
  const nlohmann::json doc{{"meta", {{"config", config_json(c)}, {"version", version}, {"seed", c.seed}}},
                           {"records", recs}};
  os << doc.dump(2) << '\n';
}

inline void write_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace detail

/// Runs one command, writing the artifact to `out` (or cfg.out when set) and
/// machine-readable error records to `err`. Returns the process exit status.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::Emitter e{cfg, {}};
  std::vector<detail::Check> checks;
  try {
    if (cfg.grid < 1) throw std::invalid_argument("--grid must be at least 1");
    switch (cfg.command) {
      case Command::Curvature: detail::run_curvature(e); break;
      case Command::Geodesic: detail::run_geodesic(e); break;
      case Command::Length: detail::run_length(e); break;
      case Command::Volume: detail::run_volume(e); break;
      case Command::Complexity: detail::run_complexity(e); break;
      case Command::Compare: detail::run_compare(e); break;
      case Command::Verify: checks = detail::run_verify(e); break;
    }
  } catch (const std::domain_error& ex) {
    detail::write_error(err, "domain", ex.what());
    return exit_domain;
  } catch (const std::invalid_argument& ex) {
    detail::write_error(err, "invalid_argument", ex.what());
    return exit_domain;
  }

  std::ofstream file;
  std::ostream* os = &out;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) {
      detail::write_error(err, "io", "cannot open " + cfg.out);
      return exit_domain;
    }
    os = &file;
  }
  if (cfg.format == Format::Csv)
    detail::write_csv(*os, e.rows);
  else
    detail::write_json(*os, cfg, e.rows);

  int status = exit_ok;
  for (const auto& c : checks)
    if (!c.passed()) {
      err << nlohmann::json{{"error", "verification"}, {"check", c.name}, {"metric", c.metric},
                            {"residual", c.residual}, {"tolerance", c.tolerance}}
                 .dump()
          << '\n';
      status = exit_verification;
    }
  return status;
}

inline int run(const RunConfig& cfg) { return run(cfg, std::cout, std::cerr); }

}  // namespace qgeo::cli
