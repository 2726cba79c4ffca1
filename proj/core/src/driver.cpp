#include "strata/driver.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <system_error>

#include "strata/errors.hpp"
#include "strata/output.hpp"

namespace strata {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

void write_file_atomic(const std::filesystem::path& target, const std::string& payload) {
  const std::filesystem::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + temp.string() + "' for writing");
    out << payload;
    out.flush();
    if (!out) throw Error("failed writing '" + temp.string() + "'");
  }
  std::filesystem::rename(temp, target);
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STRATA_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 0;  // engine default: hardware parallelism
}

int run_to_directory(const LoadedConfig& loaded, const std::filesystem::path& out_dir,
                     const RunOptions& options, std::string* error_message) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
      throw Error("cannot create output directory '" + out_dir.string() + "'");
    }

    const std::string started = utc_timestamp();
    const ExperimentResult result = run_experiment(loaded.config, options);
    const std::string finished = utc_timestamp();

    write_file_atomic(out_dir / "result.json", result_to_json(result, loaded));
    write_file_atomic(out_dir / "result.csv", result_to_csv(result));
    write_file_atomic(out_dir / "manifest.json", manifest_to_json(loaded, started, finished));
    return 0;
  } catch (const std::exception& e) {
    if (error_message) *error_message = e.what();
    return 1;
  }
}

}  // namespace strata
