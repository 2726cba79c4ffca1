#pragma once

#include <string>

#include "strata/config.hpp"
#include "strata/montecarlo.hpp"

namespace strata {

/// Fixed-format float rendering used by every writer: 17 significant digits,
/// so JSON and CSV encode byte-identical numbers that round-trip exactly.
std::string format_float(double value);

/// result.json payload (deterministic: no timestamps, ordered keys).
std::string result_to_json(const ExperimentResult& result, const LoadedConfig& loaded);

/// result.csv payload: one row per n with the row stats flattened into
/// columns; always ends with the discarded count.
std::string result_to_csv(const ExperimentResult& result);

/// manifest.json payload.
std::string manifest_to_json(const LoadedConfig& loaded, const std::string& started_utc,
                             const std::string& finished_utc);

}  // namespace strata
