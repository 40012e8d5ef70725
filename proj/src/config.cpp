#include "ivse/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace ivse {

using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::simulate: return "simulate";
    case Mode::euler: return "euler";
    case Mode::compare: return "compare";
    case Mode::kappa: return "kappa";
    case Mode::oracle: return "oracle";
    case Mode::verify: return "verify";
  }
  return "simulate";
}

Mode parse_mode(const std::string& text) {
  for (Mode m : {Mode::simulate, Mode::euler, Mode::compare, Mode::kappa, Mode::oracle, Mode::verify})
    if (to_string(m) == text) return m;
  throw ConfigError("key 'mode': unrecognized value '" + text +
                    "' (expected simulate, euler, compare, kappa, oracle or verify)");
}

namespace {

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw ConfigError("key '" + key + "': expected " + expected);
}

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

std::int64_t as_integer(const std::string& key, const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  type_error(key, "an integer");
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

using Setter = std::function<void(RunConfig&, const std::string&, const json&)>;

template <typename T>
Setter number(T RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const json& v) { c.*field = as_number(k, v); };
}
Setter integer(std::int64_t RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const json& v) { c.*field = as_integer(k, v); };
}
Setter opt_number(std::optional<double> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const json& v) { c.*field = as_number(k, v); };
}
Setter opt_integer(std::optional<std::int64_t> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const json& v) { c.*field = as_integer(k, v); };
}
Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const json& v) { c.*field = as_string(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](RunConfig& c, const std::string& k, const json& v) { c.mode = parse_mode(as_string(k, v)); }},
      {"r_min", opt_number(&RunConfig::r_min)},
      {"r_max", opt_number(&RunConfig::r_max)},
      {"z_min", opt_number(&RunConfig::z_min)},
      {"z_max", opt_number(&RunConfig::z_max)},
      {"n_r", opt_integer(&RunConfig::n_r)},
      {"n_z", opt_integer(&RunConfig::n_z)},
      {"r_c", number(&RunConfig::r_c)},
      {"z_c", number(&RunConfig::z_c)},
      {"rho_r", number(&RunConfig::rho_r)},
      {"rho_z", number(&RunConfig::rho_z)},
      {"amplitude", number(&RunConfig::amplitude)},
      {"rule_order", integer(&RunConfig::rule_order)},
      {"delta", number(&RunConfig::delta)},
      {"stepper", text(&RunConfig::stepper)},
      {"cfl", opt_number(&RunConfig::cfl)},
      {"lower_tolerance", number(&RunConfig::lower_tolerance)},
      {"sup_cap_factor", number(&RunConfig::sup_cap_factor)},
      {"max_steps", integer(&RunConfig::max_steps)},
      {"support_threshold", number(&RunConfig::support_threshold)},
      {"kappa_safety", number(&RunConfig::kappa_safety)},
      {"kappa_max_points", integer(&RunConfig::kappa_max_points)},
      {"snapshot_every", integer(&RunConfig::snapshot_every)},
      {"horizon", number(&RunConfig::horizon)},
      {"snapshot_interval", number(&RunConfig::snapshot_interval)},
      {"kappa_threshold", number(&RunConfig::kappa_threshold)},
      {"energy_tolerance", number(&RunConfig::energy_tolerance)},
      {"kappa_integral_tolerance", number(&RunConfig::kappa_integral_tolerance)},
      {"kappa_wiggle", number(&RunConfig::kappa_wiggle)},
      {"circulation_tolerance", number(&RunConfig::circulation_tolerance)},
      {"ratio_tolerance", number(&RunConfig::ratio_tolerance)},
      {"dqdt_tolerance", number(&RunConfig::dqdt_tolerance)},
      {"box_length", number(&RunConfig::box_length)},
      {"spectral_n", integer(&RunConfig::spectral_n)},
      {"seed",
       [](RunConfig& c, const std::string& k, const json& v) {
         const std::int64_t s = as_integer(k, v);
         if (s < 0) throw ConfigError("key 'seed': must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"hs_s", number(&RunConfig::hs_s)},
      {"random_pairs", integer(&RunConfig::random_pairs)},
      {"picard_substeps", integer(&RunConfig::picard_substeps)},
      {"picard_max_iter", integer(&RunConfig::picard_max_iter)},
      {"picard_tol", number(&RunConfig::picard_tol)},
      {"identity_tolerance", number(&RunConfig::identity_tolerance)},
      {"output_dir", text(&RunConfig::output_dir)},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw ConfigError("key '" + key + "': " + constraint);
}

}  // namespace

void RunConfig::resolve_defaults() {
  const bool euler_grid = mode == Mode::euler || mode == Mode::compare;
  if (!r_min) r_min = euler_grid ? 0.0 : 1.0;
  if (!r_max) r_max = euler_grid ? 4.0 : 3.0;
  if (!z_min) z_min = euler_grid ? 0.0 : 0.25;
  if (!z_max) z_max = 2.0;
  if (!n_r) n_r = euler_grid ? 256 : 128;
  if (!n_z) n_z = euler_grid ? 256 : 128;
  if (!cfl) cfl = euler_grid ? 0.4 : 0.1;
}

json RunConfig::to_json() const {
  json j;
  j["mode"] = to_string(mode);
  const auto put = [&](const char* k, const auto& v) {
    if (v) j[k] = *v;
  };
  put("r_min", r_min);
  put("r_max", r_max);
  put("z_min", z_min);
  put("z_max", z_max);
  put("n_r", n_r);
  put("n_z", n_z);
  put("cfl", cfl);
  j["r_c"] = r_c;
  j["z_c"] = z_c;
  j["rho_r"] = rho_r;
  j["rho_z"] = rho_z;
  j["amplitude"] = amplitude;
  j["rule_order"] = rule_order;
  j["delta"] = delta;
  j["stepper"] = stepper;
  j["lower_tolerance"] = lower_tolerance;
  j["sup_cap_factor"] = sup_cap_factor;
  j["max_steps"] = max_steps;
  j["support_threshold"] = support_threshold;
  j["kappa_safety"] = kappa_safety;
  j["kappa_max_points"] = kappa_max_points;
  j["snapshot_every"] = snapshot_every;
  j["horizon"] = horizon;
  j["snapshot_interval"] = snapshot_interval;
  j["kappa_threshold"] = kappa_threshold;
  j["energy_tolerance"] = energy_tolerance;
  j["kappa_integral_tolerance"] = kappa_integral_tolerance;
  j["kappa_wiggle"] = kappa_wiggle;
  j["circulation_tolerance"] = circulation_tolerance;
  j["ratio_tolerance"] = ratio_tolerance;
  j["dqdt_tolerance"] = dqdt_tolerance;
  j["box_length"] = box_length;
  j["spectral_n"] = spectral_n;
  j["seed"] = seed;
  j["hs_s"] = hs_s;
  j["random_pairs"] = random_pairs;
  j["picard_substeps"] = picard_substeps;
  j["picard_max_iter"] = picard_max_iter;
  j["picard_tol"] = picard_tol;
  j["identity_tolerance"] = identity_tolerance;
  j["output_dir"] = output_dir;
  return j;
}

RunConfig parse_config(const json& object) {
  if (!object.is_object()) throw ConfigError("config: expected a flat JSON object");
  if (!object.contains("mode")) throw ConfigError("key 'mode': required");
  RunConfig c;
  const auto& table = setters();
  for (const auto& [key, value] : object.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("key '" + key + "': unknown key");
    if (value.is_object() || value.is_array()) throw ConfigError("key '" + key + "': nested values are not allowed");
    it->second(c, key, value);
  }
  c.resolve_defaults();
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& text) {
  json object;
  try {
    object = json::parse(text.empty() ? std::string("{}") : text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(object);
}

void apply_override(json& object, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  object[key] = value;
}

void validate(const RunConfig& c) {
  const double r_min = c.r_min.value_or(0.0), r_max = c.r_max.value_or(1.0);
  const double z_min = c.z_min.value_or(0.0), z_max = c.z_max.value_or(1.0);
  require(r_min >= 0.0, "r_min", "must be >= 0");
  require(z_min >= 0.0, "z_min", "must be >= 0");
  require(r_max > r_min, "r_max", "must exceed r_min");
  require(z_max > z_min, "z_max", "must exceed z_min");
  require(c.n_r.value_or(2) >= 2, "n_r", "must be >= 2");
  require(c.n_z.value_or(2) >= 2, "n_z", "must be >= 2");
  require(c.rho_r > 0.0, "rho_r", "must be positive");
  require(c.rho_z > 0.0, "rho_z", "must be positive");
  require(std::isfinite(c.amplitude), "amplitude", "must be finite");
  if (c.mode != Mode::oracle)
    require(c.amplitude <= 0.0, "amplitude",
            "must be nonpositive: the blowup and anisotropy statements need omega_theta <= 0 in the upper half-plane");
  require(c.rule_order >= 2 && c.rule_order <= 512, "rule_order", "must be in [2, 512]");
  require(c.stepper == "exponential" || c.stepper == "rk4", "stepper", "must be 'exponential' or 'rk4'");
  require(c.cfl.value_or(0.1) > 0.0, "cfl", "must be positive");
  require(c.lower_tolerance >= 0.0 && c.lower_tolerance < 1.0, "lower_tolerance", "must be in [0, 1)");
  require(c.sup_cap_factor > 1.0, "sup_cap_factor", "must exceed 1");
  require(c.max_steps >= 1, "max_steps", "must be >= 1");
  require(c.support_threshold >= 0.0, "support_threshold", "must be >= 0");
  require(c.kappa_safety > 0.0 && c.kappa_safety <= 1.0, "kappa_safety", "must be in (0, 1]");
  require(c.kappa_max_points >= 2, "kappa_max_points", "must be >= 2");
  require(c.snapshot_every >= 0, "snapshot_every", "must be >= 0");
  require(c.horizon > 0.0, "horizon", "must be positive");
  require(c.snapshot_interval > 0.0, "snapshot_interval", "must be positive");
  require(c.kappa_threshold > 0.0 && c.kappa_threshold < 1.0, "kappa_threshold", "must be in (0, 1)");
  for (const auto& [k, v] : {std::pair{"energy_tolerance", c.energy_tolerance},
                             {"kappa_integral_tolerance", c.kappa_integral_tolerance},
                             {"kappa_wiggle", c.kappa_wiggle},
                             {"circulation_tolerance", c.circulation_tolerance},
                             {"ratio_tolerance", c.ratio_tolerance},
                             {"dqdt_tolerance", c.dqdt_tolerance},
                             {"identity_tolerance", c.identity_tolerance},
                             {"picard_tol", c.picard_tol}})
    require(v >= 0.0, k, "must be >= 0");
  require(c.box_length > 0.0, "box_length", "must be positive");
  require(c.spectral_n >= 8 && c.spectral_n % 2 == 0 && c.spectral_n <= 512, "spectral_n", "must be even, in [8, 512]");
  require(c.random_pairs >= 1, "random_pairs", "must be >= 1");
  require(c.picard_substeps >= 1, "picard_substeps", "must be >= 1");
  require(c.picard_max_iter >= 1, "picard_max_iter", "must be >= 1");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config.to_json().dump();  // nlohmann::json sorts object keys
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ivse
