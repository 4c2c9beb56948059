#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dispersal/clustering.hpp"
#include "dispersal/dispersion.hpp"
#include "dispersal/io.hpp"
#include "dispersal/synth.hpp"

namespace dispersal::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
  kNoElbow = 4,
  kNumericalDegenerate = 5,
};

enum class Command { gen_toy2d, gen_morph, distmat, sweep, ds };
enum class DistanceKind { auto_detect, sqeuclidean, chamfer };

/// Fully parsed command line.
struct RunConfig {
  Command command = Command::ds;
  std::vector<std::string> inputs;
  std::string output;
  DistanceKind distance = DistanceKind::auto_detect;
  ClusterMethod method = ClusterMethod::kmedoids;
  KRange ks = kToySweep;
  std::optional<std::size_t> k;
  bool auto_k = false;
  std::uint64_t seed = 0;
  io::MatrixFormat format = io::MatrixFormat::csv;
  std::optional<unsigned> threads;
  bool to_stdout = false;
  APConfig ap;

  ToySpec toy;
  MorphSpec morph;
  bool viewer_centered = false;
  std::vector<double> alphas{std::begin(kViewpointAlphaGrid), std::end(kViewpointAlphaGrid)};
};

/// "start:stop[:step]" or "start..stop", inclusive. Throws InvalidArgument.
KRange parse_k_range(const std::string& text);

/// Parses a command line (without the program name). Throws InvalidArgument
/// on usage errors; returns nullopt after printing help to `out`.
std::optional<RunConfig> parse(const std::vector<std::string>& args, std::ostream& out);

/// Executes a parsed configuration; throws the library's error types.
void execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse + execute with errors mapped to exit codes. Logs go to `err`; `out`
/// only receives results when --stdout is passed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dispersal::cli
