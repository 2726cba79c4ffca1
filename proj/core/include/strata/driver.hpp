#pragma once

#include <filesystem>
#include <string>

#include "strata/config.hpp"
#include "strata/montecarlo.hpp"

namespace strata {

/// Thread count for the replication loop: explicit request if positive,
/// otherwise the STRATA_THREADS environment variable, otherwise hardware
/// parallelism (0 = let the engine decide).
int resolve_threads(int requested);

/// Run the configured experiment and write result.json, result.csv and
/// manifest.json into out_dir (created if needed). Files are written to a
/// temporary name and renamed, so a failed run leaves no partial outputs.
/// Returns 0 on success; on failure returns nonzero and, when
/// error_message is non-null, stores a diagnostic.
int run_to_directory(const LoadedConfig& loaded, const std::filesystem::path& out_dir,
                     const RunOptions& options = {}, std::string* error_message = nullptr);

}  // namespace strata
