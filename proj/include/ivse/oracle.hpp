#pragma once

// Identity suite for the spectral oracle: each check records a measured
// residual and the limit it must stay under.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ivse/spectral.hpp"

namespace ivse {

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const std::vector<Check>& checks);
bool all_pass(const std::vector<Check>& checks);

struct OracleSuiteConfig {
  double length = 2.0 * kPi;  // box for random fields and the Taylor-Green datum
  std::size_t n = 32;
  std::uint64_t seed = 12345;
  std::size_t fields = 20;
  std::vector<double> s_values{0.0, 1.0, 1.7, 2.5};
  double s = 1.7;  // bilinear constant, algebra ratio and Picard norm
  double tolerance = 1e-12;
  std::size_t picard_n = 32;
  std::size_t picard_substeps = 64;
  std::size_t picard_max_iter = 40;
  double picard_tol = 1e-12;
  /// Ring-pair embedding checks on a box of this size and resolution (n = 0 skips).
  double ring_box = 10.0;
  std::size_t ring_n = 64;
};

std::vector<Check> isometry_checks(const OracleSuiteConfig& config);
std::vector<Check> helmholtz_checks(const OracleSuiteConfig& config);
std::vector<Check> biot_savart_checks(const OracleSuiteConfig& config);
std::vector<Check> bilinear_checks(const OracleSuiteConfig& config);

struct PicardSuiteResult {
  std::vector<Check> checks;
  double bilinear_constant = 0.0;
  double datum_norm = 0.0;
  double T = 0.0;
  double contraction_bound = 0.0;  // 4 C ||w0|| T
  PicardReport report;
};
/// Taylor-Green datum with T = 0.5 / (4 C ||w0||_{H^s}), C measured on random pairs and the datum.
PicardSuiteResult picard_checks(const OracleSuiteConfig& config);

std::vector<Check> embed_checks(const OracleSuiteConfig& config);

/// Every check above.
std::vector<Check> run_oracle_suite(const OracleSuiteConfig& config);

}  // namespace ivse
