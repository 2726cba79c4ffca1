#include "strata/output.hpp"

#include <cstdio>
#include <sstream>

#include "strata/version.hpp"

namespace strata {

namespace {

std::string json_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char ch : text) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", ch);
          out += buffer;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

void append_matrix(std::ostringstream& out, const Matrix& m) {
  out << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out << ',';
    out << '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_float(m(i, j));
    }
    out << ']';
  }
  out << ']';
}

}  // namespace

std::string format_float(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string result_to_json(const ExperimentResult& result, const LoadedConfig& loaded) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema\": \"strata.result.v1\",\n";
  out << "  \"experiment\": \"" << experiment_kind_name(result.kind) << "\",\n";
  out << "  \"library_version\": \"" << kVersion << "\",\n";
  out << "  \"config_checksum\": \"" << json_escape(loaded.checksum) << "\",\n";
  out << "  \"base_seed\": " << loaded.config.base_seed << ",\n";
  out << "  \"alpha\": " << format_float(loaded.config.alpha) << ",\n";
  out << "  \"replications\": " << loaded.config.replications << ",\n";
  out << "  \"n_grid\": [";
  for (std::size_t i = 0; i < loaded.config.n_grid.size(); ++i) {
    if (i > 0) out << ',';
    out << loaded.config.n_grid[i];
  }
  out << "],\n";

  out << "  \"rows\": [";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const ResultRow& row = result.rows[i];
    out << (i > 0 ? ",\n    {" : "\n    {");
    out << "\"n\": " << row.n << ", \"replications\": " << row.replications
        << ", \"r_effective\": " << row.r_effective() << ", \"discarded\": " << row.discarded
        << ", \"stats\": {";
    for (std::size_t k = 0; k < row.stats.size(); ++k) {
      if (k > 0) out << ", ";
      out << '"' << json_escape(row.stats[k].first) << "\": " << format_float(row.stats[k].second);
    }
    out << "}}";
  }
  out << "\n  ],\n";

  out << "  \"summary\": {";
  for (std::size_t k = 0; k < result.summary.size(); ++k) {
    if (k > 0) out << ", ";
    out << '"' << json_escape(result.summary[k].first)
        << "\": " << format_float(result.summary[k].second);
  }
  out << "},\n";

  out << "  \"matrices\": {";
  for (std::size_t k = 0; k < result.matrices.size(); ++k) {
    if (k > 0) out << ", ";
    out << '"' << json_escape(result.matrices[k].first) << "\": ";
    append_matrix(out, result.matrices[k].second);
  }
  out << "}\n";
  out << "}\n";
  return out.str();
}

std::string result_to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "n";
  if (!result.rows.empty()) {
    for (const auto& [name, value] : result.rows.front().stats) out << ',' << name;
  }
  out << ",discarded\n";
  for (const ResultRow& row : result.rows) {
    out << row.n;
    for (const auto& [name, value] : row.stats) out << ',' << format_float(value);
    out << ',' << row.discarded << '\n';
  }
  return out.str();
}

std::string manifest_to_json(const LoadedConfig& loaded, const std::string& started_utc,
                             const std::string& finished_utc) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema\": \"strata.manifest.v1\",\n";
  out << "  \"config_checksum\": \"" << json_escape(loaded.checksum) << "\",\n";
  out << "  \"library_version\": \"" << kVersion << "\",\n";
  out << "  \"experiment\": \"" << experiment_kind_name(loaded.config.experiment) << "\",\n";
  out << "  \"resolved_seed\": " << loaded.config.base_seed << ",\n";
  out << "  \"started_utc\": \"" << json_escape(started_utc) << "\",\n";
  out << "  \"finished_utc\": \"" << json_escape(finished_utc) << "\",\n";
  out << "  \"outputs\": {\"result_json\": \"result.json\", \"result_csv\": \"result.csv\"}\n";
  out << "}\n";
  return out.str();
}

}  // namespace strata
