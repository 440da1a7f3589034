#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace svet::cli {

enum ExitCode : int { kSuccess = 0, kMalformedInput = 2, kNotConverged = 3 };

/// Bad flags or parameter values; maps to kMalformedInput.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> counts;
  std::optional<std::filesystem::path> phases;
  std::uint64_t seed = 1;
  int replicates = 400;
  std::optional<std::filesystem::path> out;
  std::optional<double> v;
  std::optional<double> intensity;
  std::optional<int> restarts;
  std::optional<int> max_iterations;
  unsigned threads = 0;
};

/// Throws UsageError on non-positive seed or replicates, out-of-range v,
/// non-positive intensity, restarts or iteration cap, and missing input files.
void validate(const RunConfig& cfg);

/// Bundled Table 1 counts, from the source tree or the install prefix.
std::filesystem::path bundled_counts();

int cmd_bounds(const RunConfig& cfg, std::ostream& out);
int cmd_predict(const RunConfig& cfg, std::ostream& out);
int cmd_optimize_angles(const RunConfig& cfg, std::ostream& out);
int cmd_correlations(const RunConfig& cfg, std::ostream& out);
int cmd_tomography(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_source_sim(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

/// Dispatches on cfg.command after validation; input errors become exit 2.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line entry point, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace svet::cli
