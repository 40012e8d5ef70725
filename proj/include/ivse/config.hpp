#pragma once

// Flat JSON run configuration. Every key has a default except `mode`; unknown
// keys are rejected. Grid keys left unset take mode-specific defaults.

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "ivse/common.hpp"

namespace ivse {

enum class Mode { simulate, euler, compare, kappa, oracle, verify };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);  // throws ConfigError

struct RunConfig {
  Mode mode = Mode::simulate;

  // grid; unset values resolve per mode
  std::optional<double> r_min, r_max, z_min, z_max;
  std::optional<std::int64_t> n_r, n_z;

  // initial ring pair
  double r_c = 2.0;
  double z_c = 1.0;
  double rho_r = 0.5;
  double rho_z = 0.5;
  double amplitude = -1.0;

  std::int64_t rule_order = 32;
  double delta = -1.0;  // negative: half a cell diagonal
  std::string stepper = "exponential";
  std::optional<double> cfl;  // 0.1 for IVSE, 0.4 for Euler
  double lower_tolerance = 0.02;
  double sup_cap_factor = 1e6;
  std::int64_t max_steps = 200000;
  double support_threshold = 1e-12;
  double kappa_safety = 0.9;
  std::int64_t kappa_max_points = 4000;
  std::int64_t snapshot_every = 0;  // steps between snapshot dumps; 0 disables

  double horizon = 5.0;
  double snapshot_interval = 0.1;
  double kappa_threshold = 1e-6;
  double energy_tolerance = 0.02;
  double kappa_integral_tolerance = 0.05;
  double kappa_wiggle = 0.01;
  double circulation_tolerance = 0.005;
  double ratio_tolerance = 0.01;  // factor-2 check: |ratio / 2 - 1|
  double dqdt_tolerance = 0.01;

  double box_length = 10.0;
  std::int64_t spectral_n = 64;
  std::uint64_t seed = 12345;
  double hs_s = 1.7;
  std::int64_t random_pairs = 20;
  std::int64_t picard_substeps = 64;
  std::int64_t picard_max_iter = 40;
  double picard_tol = 1e-12;
  double identity_tolerance = 1e-12;

  std::string output_dir = "ivse_out";

  /// Fill unset grid keys with the defaults of the configured mode.
  void resolve_defaults();
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Parse and validate a flat JSON object. Errors name the key and constraint.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& object);

/// Apply "key=value" (value parsed as JSON, falling back to a string).
void apply_override(nlohmann::json& object, const std::string& assignment);

/// Check every constraint of an already-resolved config.
void validate(const RunConfig& config);

/// 64-bit FNV-1a of the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace ivse
