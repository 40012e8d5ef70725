#pragma once

#include <filesystem>
#include <string>

#include "ivse/config.hpp"

namespace ivse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitRuntimeError = 3;

/// Execute one configured run, writing artifacts under config.output_dir.
/// A manifest is written in every case. Returns the process exit code.
int run(const RunConfig& config);

/// Write error.json and manifest.json for a run that could not start (e.g. a
/// rejected configuration). `config_text` is echoed as given.
void write_failure_artifacts(const std::filesystem::path& dir, const std::string& kind, const std::string& message,
                             int exit_code);

std::string version();

}  // namespace ivse
