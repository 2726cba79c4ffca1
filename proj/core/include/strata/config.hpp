#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "strata/montecarlo.hpp"

namespace strata {

/// Raw (textual) form of one group block, kept so a parsed config can be
/// re-serialized canonically.
struct RawGroup {
  std::string kind;            // gaussian | uniform | exponential
  std::vector<double> mean;    // gaussian
  std::vector<double> cov;     // gaussian, row-major d*d
  std::vector<double> lo;      // uniform
  std::vector<double> hi;      // uniform
  double rate = 0.0;           // exponential
  double offset = 0.0;         // exponential
};

/// Raw form of an entire config file after parsing and default resolution.
struct RawConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::int64_t replications = 0;
  double alpha = 0.0;
  std::vector<std::int64_t> n_grid;
  int dim = 0;
  int num_groups = 0;
  std::vector<double> group_probs;
  std::vector<RawGroup> groups;
  std::string membership_kind;                 // iid | schedule | incentivized
  std::vector<double> membership_probs;        // iid (defaults to group_probs)
  std::vector<int> membership_pattern;         // schedule
  std::vector<double> membership_base_probs;   // incentivized
  int boost_group = 0;                         // incentivized
  double boost_factor = 0.0;                   // incentivized
  std::int64_t phase_start = 0;                // incentivized
  std::string weights;                         // empirical | known | perturbed
};

/// A fully parsed and validated experiment configuration, together with its
/// canonical text form and checksum.
struct LoadedConfig {
  ExperimentConfig config;
  RawConfig raw;
  std::string canonical_text;
  std::string checksum;
};

/// Parse a flat `key = value` config file ('#' starts a comment; vectors are
/// whitespace- or comma-separated; covariances row-major). Every diagnostic
/// names the offending key and line. Throws ConfigError.
LoadedConfig parse_config(const std::filesystem::path& path);

/// Same parser over an in-memory string.
LoadedConfig parse_config_text(std::string_view text);

/// Deterministic canonical rendering: fixed key order, resolved defaults,
/// floats at 17 significant digits. Parsing the result reproduces the
/// same configuration.
std::string canonical_config_text(const RawConfig& raw);

/// FNV-1a 64-bit checksum (hex) of the canonical config text.
std::string config_checksum(std::string_view canonical_text);

/// Replace the seed (CLI --seed override) and refresh the canonical text and
/// checksum accordingly.
void override_seed(LoadedConfig& loaded, std::uint64_t seed);

}  // namespace strata
