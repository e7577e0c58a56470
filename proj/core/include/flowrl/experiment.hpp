#ifndef FLOWRL_EXPERIMENT_HPP_
#define FLOWRL_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flowrl/dqn.hpp"
#include "flowrl/flow.hpp"
#include "flowrl/mbf.hpp"
#include "flowrl/partition.hpp"
#include "flowrl/qlearning.hpp"
#include "flowrl/simnet.hpp"
#include "flowrl/traffic.hpp"

namespace flowrl {

enum class Mode { kQl, kDqn, kMbf, kOracle, kSignificance };

std::string to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

// The desk-scale reference traffic: 20 hosts, 64-entry table, 60 s windows.
TrafficProfile reference_profile();

struct ExperimentConfig {
  Mode mode = Mode::kQl;
  std::uint64_t seed = 1;
  int episodes_cap = 1000;
  double goal_mu = 0.4;
  std::int64_t table_capacity_bits = 64 * kRuleSizeBits;
  TrafficProfile traffic = reference_profile();
  int n_hosts = 20;
  double orchestration_window = 60.0;
  double episode_duration = 60.0;
  int training_sets = 0;  // 0 selects a random initial table
  int training_episodes_cap = 100;
  ParamMode param_mode = ParamMode::kBoth;
  ThresholdConfig initial_state{200, 0};
  int learning_iteration = 100;
  double alpha = 0.1;
  double gamma = 0.95;
  double sgd_learning_rate = 0.01;
  std::string output_path;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ValidationError naming the offending field.
void validate(const ExperimentConfig& cfg);

// Flat key=value text; `#` starts a comment. Throws ParseError (with the
// line number) or ValidationError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
// Every key, in load_config syntax.
std::string config_text(const ExperimentConfig& cfg);
// Key reference for --help.
std::string config_help();

struct RunSummary {
  std::int64_t initial_overhead = 0;
  std::int64_t best_overhead = 0;
  double reduction = 0.0;
  double hit_ratio = 0.0;
  int episodes_run = 0;
  int episodes_to_goal = -1;  // -1 when the goal was not met
  bool goal_met = false;
  ThresholdConfig best_thresholds;
  std::size_t pool_flows = 0;
  std::int64_t total_packets = 0;
  std::optional<std::int64_t> oracle_objective;
  // Significance mode: reduction reached by each parameter mode.
  std::optional<double> reduction_freq_only;
  std::optional<double> reduction_recentness_only;
  std::optional<double> reduction_both;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<EpisodeRecord> rows;
  RunSummary summary;
  // Significance mode keeps the single-parameter traces here.
  std::vector<EpisodeRecord> freq_only_rows;
  std::vector<EpisodeRecord> recentness_only_rows;
};

struct PolicyIo {
  std::string save_path;  // write the trained Q-table / network here
  std::string load_path;  // start from this Q-table / network
};

RunReport run_experiment(const ExperimentConfig& cfg, const PolicyIo& io = {});

// CSV at `path` plus `path.summary`; significance runs also write
// `path.freq_only` and `path.recentness_only`. Throws IoError.
void write_report(const RunReport& report, const std::string& path);
void write_rows(std::ostream& out, const std::vector<EpisodeRecord>& rows);
std::string summary_text(const RunReport& report);

// Parses a CSV written by write_rows. Throws ParseError.
std::vector<EpisodeRecord> read_rows(std::istream& in);

// Oracle instance over the pool: t = the flow's packets in the episode,
// s = the rule size.
IlpInstance oracle_instance(const PlacementEnv& env,
                            std::vector<FlowId>* ids = nullptr);

}  // namespace flowrl

#endif  // FLOWRL_EXPERIMENT_HPP_
