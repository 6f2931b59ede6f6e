#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "osa/exact_solver.hpp"
#include "osa/instance.hpp"
#include "osa/policy.hpp"
#include "osa/reward.hpp"
#include "osa/theorem_checker.hpp"

namespace osa::cli {

/// Bad config file, bad override or an instance that violates its
/// invariants. `field` is the dotted key path, `line` is 1-based when the
/// value came from a file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::optional<std::size_t> line, const std::string& message);

  const std::string& field() const noexcept { return field_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::string field_;
  std::optional<std::size_t> line_;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Myopic;
  std::uint64_t seed = 1;
  /// Channels sensed by the fixed policy.
  std::vector<ChannelId> channels;
};

struct SimulateConfig {
  std::size_t episodes = 10000;
  std::uint64_t seed = 1;
  /// Write the slot-by-slot trace of one episode as CSV.
  bool trace = false;
  std::size_t trace_episode = 0;
};

struct VerifyConfig {
  VerifyOptions options;
  /// Also compare myopic and optimal values when the conditions hold.
  bool theorem = true;
};

struct SweepConfig {
  SweepGrid grid;
  /// Cap on the summed expansion cost of all points; 0 = unlimited.
  double budget = 0.0;
};

struct OutputConfig {
  /// Empty: fall back to OSA_OUTPUT_DIR, then the working directory.
  std::string dir;
  /// Base name of the output files; empty = the command name.
  std::string name;
};

struct RunConfig {
  explicit RunConfig(Instance inst) : instance(std::move(inst)) {}

  Instance instance;
  DeltaDomain condition_domain = DeltaDomain::Band;
  DeltaMethod condition_method = DeltaMethod::ClosedForm;
  PolicyConfig policy;
  SolverOptions solver;
  SimulateConfig simulate;
  VerifyConfig verify;
  SweepConfig sweep;
  OutputConfig output;
  /// Worker threads; 0 = machine parallelism.
  std::size_t threads = 0;
};

/// Instance used when the config has no instance section: N=4, k=2, T=4,
/// beta=0.9, p01=0.3, p11=0.7, eps=0.05, sum-throughput, stationary start.
RunConfig default_config();

/// "key.path=value" with the value parsed as a YAML scalar or flow sequence.
using Override = std::pair<std::string, std::string>;

Override parse_override(const std::string& text);

/// Parses `text` (YAML; JSON is accepted as a subset), applies overrides in
/// order and validates. Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides = {});

/// As parse_config on the contents of `path`.
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<Override>& overrides = {});

/// Resolved output directory: output.dir, else $OSA_OUTPUT_DIR, else ".".
std::filesystem::path output_directory(const RunConfig& config);

}  // namespace osa::cli
