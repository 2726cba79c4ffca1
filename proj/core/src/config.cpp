#include "strata/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "strata/errors.hpp"

namespace strata {

namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

struct Entry {
  std::string value;
  std::int64_t line = 0;
  bool consumed = false;
};

/// Key/value store for one config file; getters mark keys consumed so
/// leftovers can be reported as unknown keys.
class KeyTable {
 public:
  void insert(const std::string& key, std::string value, std::int64_t line) {
    auto [it, inserted] = entries_.try_emplace(key, Entry{std::move(value), line, false});
    if (!inserted) throw ConfigError("duplicate key '" + key + "'", line);
  }

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& require(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
    it->second.consumed = true;
    return it->second;
  }

  const Entry* optional(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
  }

  void reject_unconsumed() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.consumed) throw ConfigError("unknown key '" + key + "'", entry.line);
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      if (!current.empty()) tokens.push_back(std::exchange(current, {}));
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

double parse_double_token(const std::string& token, const std::string& key, std::int64_t line) {
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + token + "' is not a number", line);
  }
}

std::int64_t parse_int_token(const std::string& token, const std::string& key,
                             std::int64_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("key '" + key + "': '" + token + "' is not an integer", line);
  }
  return value;
}

std::vector<double> parse_doubles(const Entry& entry, const std::string& key) {
  std::vector<double> values;
  for (const auto& token : split_tokens(entry.value)) {
    values.push_back(parse_double_token(token, key, entry.line));
  }
  if (values.empty()) throw ConfigError("key '" + key + "' has no values", entry.line);
  return values;
}

std::vector<std::int64_t> parse_ints(const Entry& entry, const std::string& key) {
  std::vector<std::int64_t> values;
  for (const auto& token : split_tokens(entry.value)) {
    values.push_back(parse_int_token(token, key, entry.line));
  }
  if (values.empty()) throw ConfigError("key '" + key + "' has no values", entry.line);
  return values;
}

double parse_scalar(const Entry& entry, const std::string& key) {
  const auto values = parse_doubles(entry, key);
  if (values.size() != 1) throw ConfigError("key '" + key + "' expects one value", entry.line);
  return values.front();
}

std::int64_t parse_int_scalar(const Entry& entry, const std::string& key) {
  const auto values = parse_ints(entry, key);
  if (values.size() != 1) throw ConfigError("key '" + key + "' expects one value", entry.line);
  return values.front();
}

ExperimentKind experiment_from_name(const std::string& name, std::int64_t line) {
  if (name == "coverage") return ExperimentKind::Coverage;
  if (name == "consistency") return ExperimentKind::Consistency;
  if (name == "clt") return ExperimentKind::Clt;
  if (name == "independence") return ExperimentKind::Independence;
  if (name == "random_index") return ExperimentKind::RandomIndex;
  throw ConfigError("unknown experiment '" + name + "'", line);
}

WeightScheme weights_from_name(const std::string& name, std::int64_t line) {
  if (name == "empirical") return WeightScheme::Empirical;
  if (name == "known") return WeightScheme::Known;
  if (name == "perturbed") return WeightScheme::Perturbed;
  throw ConfigError("unknown weight scheme '" + name + "'", line);
}

Vector to_vector(const std::vector<double>& values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

Matrix to_matrix(const std::vector<double>& values, int dim) {
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      m(i, j) = values[static_cast<std::size_t>(i * dim + j)];
    }
  }
  return m;
}

GroupDistribution build_group(const RawGroup& raw, int dim, const std::string& prefix,
                              std::int64_t line) {
  try {
    if (raw.kind == "gaussian") {
      return GroupDistribution::gaussian(to_vector(raw.mean), to_matrix(raw.cov, dim));
    }
    if (raw.kind == "uniform") {
      return GroupDistribution::uniform_box(to_vector(raw.lo), to_vector(raw.hi));
    }
    if (raw.kind == "exponential") {
      return GroupDistribution::shifted_exponential(raw.rate, raw.offset);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(prefix + ": " + e.what(), line);
  }
  throw ConfigError("unknown distribution kind '" + raw.kind + "'", line);
}

MembershipProcess build_membership(const RawConfig& raw, std::int64_t line) {
  try {
    if (raw.membership_kind == "iid") {
      return MembershipProcess::iid(raw.membership_probs);
    }
    if (raw.membership_kind == "schedule") {
      return MembershipProcess::schedule(raw.membership_pattern, raw.num_groups);
    }
    if (raw.membership_kind == "incentivized") {
      return MembershipProcess::incentivized(raw.membership_base_probs, raw.boost_group,
                                             raw.boost_factor, raw.phase_start);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("membership: ") + e.what(), line);
  }
  throw ConfigError("unknown membership kind '" + raw.membership_kind + "'", line);
}

LoadedConfig build(KeyTable& table) {
  RawConfig raw;

  const Entry& experiment_entry = table.require("experiment");
  raw.experiment = experiment_entry.value;
  const ExperimentKind kind = experiment_from_name(raw.experiment, experiment_entry.line);

  raw.seed = static_cast<std::uint64_t>(parse_int_scalar(table.require("seed"), "seed"));
  raw.replications = parse_int_scalar(table.require("replications"), "replications");
  const Entry& alpha_entry = table.require("alpha");
  raw.alpha = parse_scalar(alpha_entry, "alpha");
  if (!(raw.alpha > 0.0 && raw.alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0,1)", alpha_entry.line);
  }

  const Entry& grid_entry = table.require("n_grid");
  raw.n_grid = parse_ints(grid_entry, "n_grid");
  std::int64_t previous = 0;
  for (std::int64_t n : raw.n_grid) {
    if (n <= previous) {
      throw ConfigError("n_grid must be strictly increasing", grid_entry.line);
    }
    previous = n;
  }

  const Entry& dim_entry = table.require("dim");
  raw.dim = static_cast<int>(parse_int_scalar(dim_entry, "dim"));
  if (raw.dim < 1) throw ConfigError("dim must be at least 1", dim_entry.line);

  const Entry& groups_entry = table.require("num_groups");
  raw.num_groups = static_cast<int>(parse_int_scalar(groups_entry, "num_groups"));
  if (raw.num_groups < 1) throw ConfigError("num_groups must be at least 1", groups_entry.line);

  const Entry& probs_entry = table.require("group_probs");
  raw.group_probs = parse_doubles(probs_entry, "group_probs");
  if (static_cast<int>(raw.group_probs.size()) != raw.num_groups) {
    throw ConfigError("group_probs must list one probability per group", probs_entry.line);
  }
  double prob_sum = 0.0;
  for (double p : raw.group_probs) {
    if (!(p > 0.0)) throw ConfigError("group_probs must be strictly positive", probs_entry.line);
    prob_sum += p;
  }
  if (std::abs(prob_sum - 1.0) > 1e-12) {
    throw ConfigError("group_probs must sum to 1", probs_entry.line);
  }

  std::vector<GroupDistribution> groups;
  for (int s = 1; s <= raw.num_groups; ++s) {
    const std::string prefix = "group" + std::to_string(s);
    RawGroup group;
    const Entry& kind_entry = table.require(prefix + ".kind");
    group.kind = kind_entry.value;
    if (group.kind == "gaussian") {
      group.mean = parse_doubles(table.require(prefix + ".mean"), prefix + ".mean");
      if (static_cast<int>(group.mean.size()) != raw.dim) {
        throw ConfigError(prefix + ".mean must have dim entries", kind_entry.line);
      }
      group.cov = parse_doubles(table.require(prefix + ".cov"), prefix + ".cov");
      if (static_cast<int>(group.cov.size()) != raw.dim * raw.dim) {
        throw ConfigError(prefix + ".cov must have dim*dim row-major entries", kind_entry.line);
      }
    } else if (group.kind == "uniform") {
      group.lo = parse_doubles(table.require(prefix + ".lo"), prefix + ".lo");
      group.hi = parse_doubles(table.require(prefix + ".hi"), prefix + ".hi");
      if (static_cast<int>(group.lo.size()) != raw.dim ||
          static_cast<int>(group.hi.size()) != raw.dim) {
        throw ConfigError(prefix + ".lo/.hi must have dim entries", kind_entry.line);
      }
    } else if (group.kind == "exponential") {
      if (raw.dim != 1) {
        throw ConfigError(prefix + ": exponential groups require dim = 1", kind_entry.line);
      }
      group.rate = parse_scalar(table.require(prefix + ".rate"), prefix + ".rate");
      group.offset = parse_scalar(table.require(prefix + ".offset"), prefix + ".offset");
    } else {
      throw ConfigError("unknown distribution kind '" + group.kind + "'", kind_entry.line);
    }
    groups.push_back(build_group(group, raw.dim, prefix, kind_entry.line));
    raw.groups.push_back(std::move(group));
  }

  const Entry& membership_entry = table.require("membership.kind");
  raw.membership_kind = membership_entry.value;
  if (raw.membership_kind == "iid") {
    if (const Entry* probs = table.optional("membership.probs")) {
      raw.membership_probs = parse_doubles(*probs, "membership.probs");
    } else {
      raw.membership_probs = raw.group_probs;  // scenario 2 default
    }
  } else if (raw.membership_kind == "schedule") {
    const Entry& pattern_entry = table.require("membership.pattern");
    for (std::int64_t label : parse_ints(pattern_entry, "membership.pattern")) {
      raw.membership_pattern.push_back(static_cast<int>(label));
    }
  } else if (raw.membership_kind == "incentivized") {
    raw.membership_base_probs =
        parse_doubles(table.require("membership.base_probs"), "membership.base_probs");
    raw.boost_group = static_cast<int>(
        parse_int_scalar(table.require("membership.boost_group"), "membership.boost_group"));
    raw.boost_factor =
        parse_scalar(table.require("membership.boost_factor"), "membership.boost_factor");
    raw.phase_start =
        parse_int_scalar(table.require("membership.phase_start"), "membership.phase_start");
  } else {
    throw ConfigError("unknown membership kind '" + raw.membership_kind + "'",
                      membership_entry.line);
  }

  const Entry& weights_entry = table.require("weights");
  raw.weights = weights_entry.value;
  const WeightScheme scheme = weights_from_name(raw.weights, weights_entry.line);

  table.reject_unconsumed();

  PopulationSpec spec = [&] {
    try {
      return PopulationSpec(raw.group_probs, std::move(groups));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }();
  MembershipProcess process = build_membership(raw, membership_entry.line);

  LoadedConfig loaded{
      ExperimentConfig{std::move(spec), std::move(process), scheme, raw.n_grid,
                       raw.replications, raw.alpha, raw.seed, kind},
      std::move(raw), {}, {}};
  try {
    validate_experiment_config(loaded.config);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  loaded.canonical_text = canonical_config_text(loaded.raw);
  loaded.checksum = config_checksum(loaded.canonical_text);
  return loaded;
}

}  // namespace

LoadedConfig parse_config_text(std::string_view text) {
  KeyTable table;
  std::int64_t line_number = 0;
  std::size_t position = 0;
  while (position <= text.size()) {
    const std::size_t end = text.find('\n', position);
    std::string line(text.substr(position, end == std::string_view::npos ? std::string_view::npos
                                                                         : end - position));
    position = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_number;

    if (const std::size_t hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    const std::size_t equals = line.find('=');
    if (equals == std::string::npos) {
      throw ConfigError("expected 'key = value'", line_number);
    }
    std::string key = line.substr(0, equals);
    std::string value = line.substr(equals + 1);
    const auto key_end = key.find_last_not_of(" \t");
    key = key_end == std::string::npos ? std::string() : key.substr(0, key_end + 1);
    const auto value_start = value.find_first_not_of(" \t");
    value = value_start == std::string::npos ? std::string() : value.substr(value_start);
    if (key.empty()) throw ConfigError("empty key", line_number);
    if (value.empty()) throw ConfigError("key '" + key + "' has an empty value", line_number);
    table.insert(key, std::move(value), line_number);
  }
  return build(table);
}

LoadedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

std::string canonical_config_text(const RawConfig& raw) {
  std::ostringstream out;
  auto doubles = [&](const std::vector<double>& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) text += ' ';
      text += format_double(values[i]);
    }
    return text;
  };

  out << "experiment = " << raw.experiment << '\n';
  out << "seed = " << raw.seed << '\n';
  out << "replications = " << raw.replications << '\n';
  out << "alpha = " << format_double(raw.alpha) << '\n';
  out << "n_grid =";
  for (std::int64_t n : raw.n_grid) out << ' ' << n;
  out << '\n';
  out << "dim = " << raw.dim << '\n';
  out << "num_groups = " << raw.num_groups << '\n';
  out << "group_probs = " << doubles(raw.group_probs) << '\n';
  for (int s = 1; s <= raw.num_groups; ++s) {
    const RawGroup& group = raw.groups[static_cast<std::size_t>(s - 1)];
    const std::string prefix = "group" + std::to_string(s);
    out << prefix << ".kind = " << group.kind << '\n';
    if (group.kind == "gaussian") {
      out << prefix << ".mean = " << doubles(group.mean) << '\n';
      out << prefix << ".cov = " << doubles(group.cov) << '\n';
    } else if (group.kind == "uniform") {
      out << prefix << ".lo = " << doubles(group.lo) << '\n';
      out << prefix << ".hi = " << doubles(group.hi) << '\n';
    } else {
      out << prefix << ".rate = " << format_double(group.rate) << '\n';
      out << prefix << ".offset = " << format_double(group.offset) << '\n';
    }
  }
  out << "membership.kind = " << raw.membership_kind << '\n';
  if (raw.membership_kind == "iid") {
    out << "membership.probs = " << doubles(raw.membership_probs) << '\n';
  } else if (raw.membership_kind == "schedule") {
    out << "membership.pattern =";
    for (int label : raw.membership_pattern) out << ' ' << label;
    out << '\n';
  } else {
    out << "membership.base_probs = " << doubles(raw.membership_base_probs) << '\n';
    out << "membership.boost_group = " << raw.boost_group << '\n';
    out << "membership.boost_factor = " << format_double(raw.boost_factor) << '\n';
    out << "membership.phase_start = " << raw.phase_start << '\n';
  }
  out << "weights = " << raw.weights << '\n';
  return out.str();
}

std::string config_checksum(std::string_view canonical_text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char ch : canonical_text) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

void override_seed(LoadedConfig& loaded, std::uint64_t seed) {
  loaded.raw.seed = seed;
  loaded.config.base_seed = seed;
  loaded.canonical_text = canonical_config_text(loaded.raw);
  loaded.checksum = config_checksum(loaded.canonical_text);
}

}  // namespace strata
