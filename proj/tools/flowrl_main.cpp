// Command-line driver: load a config, apply flag overrides, run, report.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "flowrl/error.hpp"
#include "flowrl/experiment.hpp"

namespace {

int run(const flowrl::ExperimentConfig& cfg, const flowrl::PolicyIo& io) {
  flowrl::RunReport report = flowrl::run_experiment(cfg, io);
  if (cfg.output_path.empty()) {
    std::cout << flowrl::summary_text(report);
  } else {
    flowrl::write_report(report, cfg.output_path);
    const auto& s = report.summary;
    std::cout << flowrl::to_string(cfg.mode) << " seed=" << cfg.seed
              << " best_overhead=" << s.best_overhead
              << " goal_met=" << (s.goal_met ? "true" : "false") << " -> "
              << cfg.output_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow-rule placement experiments"};
  app.footer("Config file keys (key=value, # comments) and defaults:\n" +
             flowrl::config_help());

  std::string mode, config_path, out_path, save_policy, load_policy;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<double> goal;
  std::optional<std::int64_t> table_bits;
  bool print_config = false;

  app.add_option("--mode", mode, "ql | dqn | mbf | oracle | significance");
  app.add_option("--config", config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "experiment seed");
  app.add_option("--episodes", episodes, "episode cap");
  app.add_option("--goal", goal, "target reduction fraction, in (0, 1)");
  app.add_option("--table-bits", table_bits, "flow table capacity in bits");
  app.add_option("--out", out_path, "CSV report path (summary goes to <path>.summary)");
  app.add_option("--save-policy", save_policy, "write the trained Q-table or network");
  app.add_option("--load-policy", load_policy, "start from a saved Q-table or network");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    flowrl::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = flowrl::load_config(config_path);
    if (!mode.empty()) {
      auto m = flowrl::parse_mode(mode);
      if (!m) {
        throw flowrl::Error(flowrl::ErrorCode::kValidationError,
                            "mode: unknown value '" + mode + "'", "harness-cli");
      }
      cfg.mode = *m;
    }
    if (seed) cfg.seed = *seed;
    if (episodes) cfg.episodes_cap = *episodes;
    if (goal) cfg.goal_mu = *goal;
    if (table_bits) cfg.table_capacity_bits = *table_bits;
    if (!out_path.empty()) cfg.output_path = out_path;
    flowrl::validate(cfg);

    if (print_config) {
      std::cout << flowrl::config_text(cfg);
      return 0;
    }
    return run(cfg, flowrl::PolicyIo{save_policy, load_policy});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
