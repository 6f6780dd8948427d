#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "qgeo/cli.hpp"

using namespace qgeo;

namespace {

struct Output {
  int status;
  std::string out;
  std::string err;
};

Output run_config(const cli::RunConfig& cfg) {
  std::ostringstream out, err;
  const int status = cli::run(cfg, out, err);
  return {status, out.str(), err.str()};
}

cli::RunConfig config(cli::Command c, MetricKind k) {
  cli::RunConfig cfg;
  cfg.command = c;
  cfg.metric = k;
  return cfg;
}

/// Value column of the first CSV row whose quantity column equals `q`.
double value_of(const std::string& csv, const std::string& q) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() == 5 && f[3] == q) return std::stod(f[1]);
  }
  throw std::runtime_error("quantity not found: " + q);
}

Output shell(const std::string& args) {
  const std::string cmd = std::string(QGEO_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

}  // namespace

TEST(Cli, CsvHeader) {
  const auto o = run_config(config(cli::Command::Curvature, MetricKind::FubiniStudy));
  EXPECT_EQ(o.status, cli::exit_ok);
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "eta_or_tau,value,metric,quantity,branch");
}

TEST(Cli, CurvatureBures) {
  const auto o = run_config(config(cli::Command::Curvature, MetricKind::Bures));
  ASSERT_EQ(o.status, cli::exit_ok);
  EXPECT_NEAR(value_of(o.out, "R"), 24.0, 1e-10);
  for (const char* q : {"K_r_theta", "K_r_phi", "K_theta_phi"})
    EXPECT_NEAR(value_of(o.out, q), 4.0, 1e-10) << q;
}

TEST(Cli, CurvatureSjoqvistSectionals) {
  const auto o = run_config(config(cli::Command::Curvature, MetricKind::Sjoqvist));
  EXPECT_NEAR(value_of(o.out, "R"), 8.0, 1e-10);
  EXPECT_NEAR(value_of(o.out, "K_r_theta"), 0.0, 1e-10);
  EXPECT_NEAR(value_of(o.out, "K_theta_phi"), 4.0, 1e-10);
}

TEST(Cli, AccessibleVolume) {
  auto cfg = config(cli::Command::Volume, MetricKind::Sjoqvist);
  cfg.accessible = true;
  const auto o = run_config(cfg);
  ASSERT_EQ(o.status, cli::exit_ok);
  EXPECT_NEAR(value_of(o.out, "V_acc_Sj"), 2.4674011002723395, 1e-15);
  EXPECT_NEAR(value_of(o.out, "V_acc_Sj_quadrature"), 2.4674011002723395, 1e-8);
}

TEST(Cli, GeodesicEmitsClosedFormAndRk4) {
  auto cfg = config(cli::Command::Geodesic, MetricKind::Sjoqvist);
  const auto o = run_config(cfg);
  ASSERT_EQ(o.status, cli::exit_ok);
  EXPECT_NE(o.out.find(",r,"), std::string::npos);
  EXPECT_NE(o.out.find(",r_rk4,"), std::string::npos);
  EXPECT_NE(o.out.find(",phi,principal"), std::string::npos);
}

TEST(Cli, ComplexityReportsFittedLaws) {
  auto cfg = config(cli::Command::Complexity, MetricKind::Sjoqvist);
  cfg.r0 = 0.0;
  cfg.rdot0 = 0.5;
  cfg.tau_max = 1e3;
  const auto o = run_config(cfg);
  ASSERT_EQ(o.status, cli::exit_ok);
  EXPECT_NEAR(value_of(o.out, "ratio_limit"), 0.25, 1e-15);
  EXPECT_NE(o.out.find("C_Sj"), std::string::npos);
  EXPECT_NE(o.out.find("S_Sj"), std::string::npos);
}

TEST(Cli, CompareRowsPresent) {
  auto cfg = config(cli::Command::Compare, MetricKind::Sjoqvist);
  cfg.eta_max = 10.0;
  const auto o = run_config(cfg);
  ASSERT_EQ(o.status, cli::exit_ok);
  EXPECT_GT(value_of(o.out, "eta_star_compare"), 0.0);
  EXPECT_GE(value_of(o.out, "L_Sj"), value_of(o.out, "L_B"));
}

TEST(Cli, JsonMirrorsRows) {
  auto cfg = config(cli::Command::Curvature, MetricKind::FubiniStudy);
  cfg.format = cli::Format::Json;
  const auto o = run_config(cfg);
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["meta"]["version"], cli::version);
  EXPECT_EQ(j["meta"]["seed"], 7);
  ASSERT_FALSE(j["records"].empty());
  EXPECT_EQ(j["records"][0]["quantity"], "R");
  EXPECT_DOUBLE_EQ(j["records"][0]["value"].get<double>(), 8.0);
}

TEST(Cli, DomainErrorExitCode) {
  auto cfg = config(cli::Command::Curvature, MetricKind::Bures);
  cfg.r0 = 1.5;
  const auto o = run_config(cfg);
  EXPECT_EQ(o.status, cli::exit_domain);
  const auto j = nlohmann::json::parse(o.err.substr(0, o.err.find('\n')));
  EXPECT_EQ(j["error"], "domain");
}

TEST(Cli, VerifyPassesAndIsDeterministic) {
  auto cfg = config(cli::Command::Verify, MetricKind::FubiniStudy);
  const auto a = run_config(cfg), b = run_config(cfg);
  EXPECT_EQ(a.status, cli::exit_ok) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, VerificationFailureExitCode) {
  setenv("QGEO_TOL", "0", 1);
  const auto o = run_config(config(cli::Command::Verify, MetricKind::FubiniStudy));
  unsetenv("QGEO_TOL");
  EXPECT_EQ(o.status, cli::exit_verification);
  EXPECT_NE(o.err.find("\"verification\""), std::string::npos);
}

TEST(CliBinary, ExamplesAndExitCodes) {
  const auto c = shell("curvature --metric bures");
  EXPECT_EQ(c.status, 0);
  EXPECT_NEAR(value_of(c.out, "R"), 24.0, 1e-10);
  const auto v = shell("volume --metric sjoqvist --accessible");
  EXPECT_NE(v.out.find("2.4674011"), std::string::npos);
  EXPECT_EQ(shell("curvature --metric bures --r0 2").status, 2);
  EXPECT_NE(shell("curvature --metric nope").status, 0);
}

TEST(CliBinary, VerifyTwiceIsByteIdentical) {
  const auto a = shell("verify --seed 7"), b = shell("verify --seed 7");
  EXPECT_EQ(a.status, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
}
