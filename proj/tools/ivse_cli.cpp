#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ivse/config.hpp"
#include "ivse/run.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ivse::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric vortex stretching experiments"};
  std::string mode, config_path, output;
  std::vector<std::string> overrides;
  app.add_option("mode", mode, "simulate | euler | compare | kappa | oracle | verify");
  app.add_option("-c,--config", config_path, "flat JSON config file");
  app.add_option("-s,--set", overrides, "override a config key, key=value (repeatable)");
  app.add_option("-o,--output", output, "output directory");
  app.set_version_flag("--version", ivse::version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ivse::kExitInvalidConfig;
  }

  ivse::configure_threads_from_env();

  std::string out_dir = output.empty() ? "ivse_out" : output;
  ivse::RunConfig config;
  try {
    nlohmann::json object = nlohmann::json::object();
    if (!config_path.empty()) {
      try {
        object = nlohmann::json::parse(slurp(config_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw ivse::ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      if (!object.is_object()) throw ivse::ConfigError("config must be a flat JSON object");
    }
    if (!mode.empty()) object["mode"] = mode;
    for (const auto& o : overrides) ivse::apply_override(object, o);
    if (!output.empty()) object["output_dir"] = output;
    else if (object.contains("output_dir") && object["output_dir"].is_string()) out_dir = object["output_dir"];
    config = ivse::parse_config(object);
  } catch (const std::exception& e) {
    std::cerr << "ivse: " << e.what() << '\n';
    ivse::write_failure_artifacts(out_dir, "ConfigError", e.what(), ivse::kExitInvalidConfig);
    return ivse::kExitInvalidConfig;
  }

  const int code = ivse::run(config);
  if (code == ivse::kExitChecksFailed) std::cerr << "ivse: some checks failed, see " << config.output_dir << '\n';
  if (code == ivse::kExitRuntimeError) std::cerr << "ivse: run failed, see " << config.output_dir << "/error.json\n";
  return code;
}
