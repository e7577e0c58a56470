#include "flowrl/experiment.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"

namespace flowrl {

namespace {

[[noreturn]] void invalid_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kValidationError, field + ": " + why);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Field {
  const char* key;
  const char* help;
  std::function<bool(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field int_field(const char* key, const char* help, T ExperimentConfig::*member) {
  return {key, help,
          [member](ExperimentConfig& c, const std::string& v) {
            std::int64_t x = 0;
            if (!parse_int(v, &x)) return false;
            c.*member = static_cast<T>(x);
            return true;
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(const char* key, const char* help,
                 double ExperimentConfig::*member) {
  return {key, help,
          [member](ExperimentConfig& c, const std::string& v) {
            return parse_double(v, &(c.*member));
          },
          [member](const ExperimentConfig& c) { return format_short(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"mode", "ql | dqn | mbf | oracle | significance",
       [](ExperimentConfig& c, const std::string& v) {
         auto m = parse_mode(v);
         if (m) c.mode = *m;
         return m.has_value();
       },
       [](const ExperimentConfig& c) { return to_string(c.mode); }},
      {"seed", "seed for traffic, training sets and agents",
       [](ExperimentConfig& c, const std::string& v) {
         std::int64_t x = 0;
         if (!parse_int(v, &x) || x < 0) return false;
         c.seed = static_cast<std::uint64_t>(x);
         return true;
       },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      int_field("episodes_cap", "episode cap of the evaluated run",
                &ExperimentConfig::episodes_cap),
      real_field("goal_mu", "target reduction fraction in (0, 1)",
                 &ExperimentConfig::goal_mu),
      int_field("table_capacity_bits",
                "flow table size in bits, 356 per entry",
                &ExperimentConfig::table_capacity_bits),
      int_field("n_hosts", "number of hosts", &ExperimentConfig::n_hosts),
      real_field("orchestration_window", "pool collection window in s",
                 &ExperimentConfig::orchestration_window),
      real_field("episode_duration", "traffic horizon of one episode in s",
                 &ExperimentConfig::episode_duration),
      {"qtable_init",
       "random | from_training:<n> initial policy",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "random") {
           c.training_sets = 0;
           return true;
         }
         const std::string prefix = "from_training:";
         std::int64_t n = 0;
         if (v.rfind(prefix, 0) != 0 || !parse_int(v.substr(prefix.size()), &n) ||
             n < 1) {
           return false;
         }
         c.training_sets = static_cast<int>(n);
         return true;
       },
       [](const ExperimentConfig& c) {
         return c.training_sets == 0
                    ? std::string("random")
                    : "from_training:" + std::to_string(c.training_sets);
       }},
      int_field("training_episodes_cap",
                "episode cap of each initialization run",
                &ExperimentConfig::training_episodes_cap),
      {"param_mode", "both | freq_only | recentness_only",
       [](ExperimentConfig& c, const std::string& v) {
         auto m = parse_param_mode(v);
         if (m) c.param_mode = *m;
         return m.has_value();
       },
       [](const ExperimentConfig& c) { return to_string(c.param_mode); }},
      {"initial_freq_thr", "starting frequency threshold",
       [](ExperimentConfig& c, const std::string& v) {
         std::int64_t x = 0;
         if (!parse_int(v, &x)) return false;
         c.initial_state.freq_threshold = static_cast<int>(x);
         return true;
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.initial_state.freq_threshold);
       }},
      {"initial_rec_thr", "starting recentness threshold in s",
       [](ExperimentConfig& c, const std::string& v) {
         std::int64_t x = 0;
         if (!parse_int(v, &x)) return false;
         c.initial_state.recentness_threshold = static_cast<int>(x);
         return true;
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.initial_state.recentness_threshold);
       }},
      int_field("learning_iteration", "steps per epsilon-decay loop",
                &ExperimentConfig::learning_iteration),
      real_field("alpha", "tabular learning rate", &ExperimentConfig::alpha),
      real_field("gamma", "discount factor", &ExperimentConfig::gamma),
      real_field("sgd_learning_rate", "network learning rate",
                 &ExperimentConfig::sgd_learning_rate),
      {"elephant_fraction", "probability a flow is an elephant",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_double(v, &c.traffic.elephant_fraction);
       },
       [](const ExperimentConfig& c) { return format_short(c.traffic.elephant_fraction); }},
      {"mice_size", "mice flow size in bytes",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_int(v, &c.traffic.mice_size);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.traffic.mice_size); }},
      {"elephant_size", "elephant flow size in bytes",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_int(v, &c.traffic.elephant_size);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.traffic.elephant_size); }},
      {"aggregate_rate", "offered load in bit/s",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_double(v, &c.traffic.aggregate_rate);
       },
       [](const ExperimentConfig& c) { return format_short(c.traffic.aggregate_rate); }},
      {"packet_size", "packet size in bytes",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_int(v, &c.traffic.packet_size);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.traffic.packet_size); }},
      {"per_flow_rate", "per-flow sending rate in bit/s",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_double(v, &c.traffic.per_flow_rate);
       },
       [](const ExperimentConfig& c) { return format_short(c.traffic.per_flow_rate); }},
      {"output_path", "report path (CSV; summary goes to <path>.summary)",
       [](ExperimentConfig& c, const std::string& v) {
         c.output_path = v;
         return true;
       },
       [](const ExperimentConfig& c) { return c.output_path; }},
  };
  return table;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kQl: return "ql";
    case Mode::kDqn: return "dqn";
    case Mode::kMbf: return "mbf";
    case Mode::kOracle: return "oracle";
    case Mode::kSignificance: return "significance";
  }
  return "ql";
}

std::optional<Mode> parse_mode(const std::string& text) {
  for (Mode m : {Mode::kQl, Mode::kDqn, Mode::kMbf, Mode::kOracle,
                 Mode::kSignificance}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

TrafficProfile reference_profile() {
  TrafficProfile p;
  // About 250 flows per minute. A 128 KiB lookup unit gives an elephant
  // roughly 200 matches, so the frequency grid spans its whole lifetime.
  p.aggregate_rate = 100e6;
  p.packet_size = 131072;
  return p;
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.goal_mu > 0.0 && cfg.goal_mu < 1.0)) {
    invalid_field("goal_mu", "must lie in (0, 1)");
  }
  if (cfg.episodes_cap < 1) invalid_field("episodes_cap", "must be at least 1");
  if (cfg.training_episodes_cap < 1) {
    invalid_field("training_episodes_cap", "must be at least 1");
  }
  if (cfg.training_sets < 0 || cfg.training_sets >= kNumStates) {
    invalid_field("qtable_init", "training set count out of range");
  }
  if (cfg.table_capacity_bits < 0) {
    invalid_field("table_capacity_bits", "must be non-negative");
  }
  if (cfg.n_hosts < 2) invalid_field("n_hosts", "must be at least 2");
  if (!(cfg.episode_duration > 0.0)) {
    invalid_field("episode_duration", "must be positive");
  }
  if (!(cfg.orchestration_window > 0.0) ||
      cfg.orchestration_window > cfg.episode_duration) {
    invalid_field("orchestration_window", "must lie in (0, episode_duration]");
  }
  if (!cfg.initial_state.on_grid()) {
    invalid_field("initial_freq_thr/initial_rec_thr",
                  "must lie on the 10-step threshold grid");
  }
  if (cfg.learning_iteration < 1) {
    invalid_field("learning_iteration", "must be at least 1");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) invalid_field("alpha", "must lie in (0, 1]");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) invalid_field("gamma", "must lie in [0, 1]");
  if (!(cfg.sgd_learning_rate > 0.0)) {
    invalid_field("sgd_learning_rate", "must be positive");
  }
  try {
    cfg.traffic.validate();
  } catch (const Error& e) {
    invalid_field("traffic", e.what());
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (auto hash = body.find('#'); hash != std::string_view::npos) {
      body = trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    const Field* field = nullptr;
    for (const Field& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (!field->set(cfg, value)) {
      invalid_field(key, "bad value '" + value + "' (line " +
                             std::to_string(line_no) + ")");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return parse_config(in);
}

std::string config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += '=';
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

std::string config_help() {
  ExperimentConfig defaults;
  std::string out;
  for (const Field& f : fields()) {
    out += "  ";
    out += f.key;
    out += std::string(f.key).size() < 22 ? std::string(22 - std::string(f.key).size(), ' ')
                                          : std::string(" ");
    out += f.help;
    out += " [";
    out += f.get(defaults);
    out += "]\n";
  }
  return out;
}

IlpInstance oracle_instance(const PlacementEnv& env, std::vector<FlowId>* ids) {
  const FlowSchedule& sched = env.schedule();
  auto end = static_cast<std::int64_t>(std::ceil(sched.horizon));
  IlpInstance inst;
  inst.capacity = env.capacity_bits();
  if (ids) ids->clear();
  for (const FlowSpec& f : sched.flows) {
    if (env.pool().find(f.id) == nullptr) continue;
    std::int64_t packets = 0;
    for (std::int64_t t = sched.first_tick(f); t < end; ++t) {
      std::int64_t n = sched.packets_at(f, t);
      if (n == 0) break;
      packets += n;
    }
    inst.rules.push_back({packets, kRuleSizeBits});
    if (ids) ids->push_back(f.id);
  }
  return inst;
}

namespace {

struct AgentOutcome {
  TrainResult result;
  EpisodeMetrics best_metrics;
};

AgentOutcome run_agent(const ExperimentConfig& cfg, PlacementEnv& env, bool dqn,
                       const PolicyIo& io) {
  ActionMask mask = actions_for(cfg.param_mode);
  std::mt19937_64 set_rng(derive_seed(cfg.seed, 2));
  std::vector<ThresholdConfig> sets;
  if (cfg.training_sets > 0) {
    sets = random_threshold_sets(cfg.training_sets, set_rng, {cfg.initial_state});
  }
  std::mt19937_64 rng(derive_seed(cfg.seed, 1));
  bool initialized = !sets.empty() || !io.load_path.empty();
  AgentOutcome out;

  if (!dqn) {
    AgentConfig train_cfg;
    train_cfg.alpha = cfg.alpha;
    train_cfg.gamma = cfg.gamma;
    train_cfg.budget = cfg.learning_iteration;
    train_cfg.goal_mu = cfg.goal_mu;
    train_cfg.episode_cap = cfg.training_episodes_cap;
    QTable q;
    if (!io.load_path.empty()) {
      std::ifstream in(io.load_path);
      if (!in) throw Error(ErrorCode::kIoError, "cannot open " + io.load_path);
      q = read_qtable(in);
    } else if (!sets.empty()) {
      q = init_qtable_from_training(sets, derive_seed(cfg.seed, 3), env,
                                    train_cfg, mask);
    } else {
      q = init_qtable_random(derive_seed(cfg.seed, 3));
    }
    AgentConfig eval_cfg = train_cfg;
    eval_cfg.episode_cap = cfg.episodes_cap;
    eval_cfg.epsilon0 = initialized ? 0.1 : 1.0;
    eval_cfg.decay = !initialized;
    out.result = q_train(env, q, eval_cfg, cfg.initial_state, rng, mask);
    if (!io.save_path.empty()) {
      std::ofstream f(io.save_path);
      if (!f) throw Error(ErrorCode::kIoError, "cannot write " + io.save_path);
      write_qtable(f, q);
    }
  } else {
    DqnConfig train_cfg;
    train_cfg.gamma = cfg.gamma;
    train_cfg.sgd_learning_rate = cfg.sgd_learning_rate;
    train_cfg.budget = cfg.learning_iteration;
    train_cfg.goal_mu = cfg.goal_mu;
    train_cfg.episode_cap = cfg.training_episodes_cap;
    std::mt19937_64 init_rng(derive_seed(cfg.seed, 3));
    Mlp net = make_qnet(train_cfg.weight_init_scale, init_rng);
    ReplayMemory memory;
    if (!io.load_path.empty()) {
      std::ifstream in(io.load_path);
      if (!in) throw Error(ErrorCode::kIoError, "cannot open " + io.load_path);
      net = read_mlp(in);
    } else if (!sets.empty()) {
      pretrain_dqn(net, memory, sets, env, train_cfg, rng, mask);
    }
    DqnConfig eval_cfg = train_cfg;
    eval_cfg.episode_cap = cfg.episodes_cap;
    eval_cfg.epsilon0 = initialized ? 0.1 : 1.0;
    eval_cfg.decay = !initialized;
    out.result = dqn_train(env, net, memory, eval_cfg, cfg.initial_state, rng, mask);
    if (!io.save_path.empty()) {
      std::ofstream f(io.save_path);
      if (!f) throw Error(ErrorCode::kIoError, "cannot write " + io.save_path);
      write_mlp(f, net);
    }
  }
  out.best_metrics = env.evaluate(out.result.best.best_thresholds);
  return out;
}

void fill_summary(RunSummary& s, const AgentOutcome& o) {
  const TrainResult& r = o.result;
  s.initial_overhead = r.initial_overhead;
  s.best_overhead = r.best.best_overhead;
  s.reduction = r.initial_overhead > 0
                    ? reduction_fraction(r.initial_overhead, r.best.best_overhead)
                    : 0.0;
  s.hit_ratio = o.best_metrics.total_lookups > 0 ? hit_ratio(o.best_metrics) : 0.0;
  s.episodes_run = r.episodes_run;
  s.goal_met = r.goal_met;
  s.episodes_to_goal = r.goal_met ? r.episodes_run : -1;
  s.best_thresholds = r.best.best_thresholds;
}

double reduction_of(const AgentOutcome& o) {
  RunSummary part;
  fill_summary(part, o);
  return part.reduction;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const PolicyIo& io) {
  validate(cfg);
  RunReport report;
  report.config = cfg;
  FlowSchedule schedule = generate_schedule(cfg.traffic, cfg.episode_duration,
                                            cfg.n_hosts, cfg.seed);
  RunSummary& s = report.summary;

  switch (cfg.mode) {
    case Mode::kQl:
    case Mode::kDqn: {
      PlacementEnv env(schedule, cfg.orchestration_window,
                       cfg.table_capacity_bits, cfg.param_mode);
      AgentOutcome o = run_agent(cfg, env, cfg.mode == Mode::kDqn, io);
      report.rows = o.result.trace;
      fill_summary(s, o);
      s.pool_flows = env.pool().size();
      s.total_packets = o.best_metrics.total_lookups;
      break;
    }
    case Mode::kSignificance: {
      ExperimentConfig sub = cfg;
      double freq_only = 0.0, rec_only = 0.0;
      for (ParamMode pm : {ParamMode::kFreqOnly, ParamMode::kRecentnessOnly,
                           ParamMode::kBoth}) {
        sub.param_mode = pm;
        PlacementEnv env(schedule, cfg.orchestration_window,
                         cfg.table_capacity_bits, pm);
        AgentOutcome o = run_agent(sub, env, /*dqn=*/true, PolicyIo{});
        if (pm == ParamMode::kFreqOnly) {
          freq_only = reduction_of(o);
          report.freq_only_rows = o.result.trace;
        } else if (pm == ParamMode::kRecentnessOnly) {
          rec_only = reduction_of(o);
          report.recentness_only_rows = o.result.trace;
        } else {
          // The combined run is the headline result.
          fill_summary(s, o);
          s.pool_flows = env.pool().size();
          s.total_packets = o.best_metrics.total_lookups;
          report.rows = o.result.trace;
        }
      }
      s.reduction_freq_only = freq_only;
      s.reduction_recentness_only = rec_only;
      s.reduction_both = s.reduction;
      break;
    }
    case Mode::kMbf: {
      FlowTable table(cfg.table_capacity_bits);
      EpisodeMetrics m = run_mbf_episode(schedule, table);
      report.rows.push_back({1, m, 0.0, {}, 0, 0.0});
      s.initial_overhead = s.best_overhead = m.overhead;
      s.hit_ratio = m.total_lookups > 0 ? hit_ratio(m) : 0.0;
      s.total_packets = m.total_lookups;
      break;
    }
    case Mode::kOracle: {
      PlacementEnv env(schedule, cfg.orchestration_window,
                       cfg.table_capacity_bits, cfg.param_mode);
      std::vector<FlowId> ids;
      IlpInstance inst = oracle_instance(env, &ids);
      Assignment a = knapsack_exact(inst);
      std::vector<FlowId> ruleset;
      for (std::size_t i : a.on_switch) ruleset.push_back(ids[i]);
      EpisodeMetrics m = env.run_ruleset(ruleset);
      report.rows.push_back({1, m, 0.0, {}, 0, 0.0});
      s.initial_overhead = s.best_overhead = m.overhead;
      s.hit_ratio = m.total_lookups > 0 ? hit_ratio(m) : 0.0;
      s.oracle_objective = a.objective;
      s.pool_flows = env.pool().size();
      s.total_packets = m.total_lookups;
      break;
    }
  }
  return report;
}

void write_rows(std::ostream& out, const std::vector<EpisodeRecord>& rows) {
  write_csv_header(out);
  for (const EpisodeRecord& r : rows) write_csv_row(out, r);
}

std::string summary_text(const RunReport& report) {
  const RunSummary& s = report.summary;
  std::ostringstream out;
  out << "# config\n" << config_text(report.config) << "# summary\n";
  out << "pool_flows=" << s.pool_flows << '\n';
  out << "total_packets=" << s.total_packets << '\n';
  out << "initial_overhead=" << s.initial_overhead << '\n';
  out << "best_overhead=" << s.best_overhead << '\n';
  out << "reduction=" << format_fixed(s.reduction, 6) << '\n';
  out << "hit_ratio=" << format_fixed(s.hit_ratio, 6) << '\n';
  out << "episodes_run=" << s.episodes_run << '\n';
  out << "episodes_to_goal=";
  if (s.goal_met) {
    out << s.episodes_to_goal;
  } else {
    out << "none";
  }
  out << '\n';
  out << "goal_met=" << (s.goal_met ? "true" : "false") << '\n';
  out << "best_freq_thr=" << s.best_thresholds.freq_threshold << '\n';
  out << "best_rec_thr=" << s.best_thresholds.recentness_threshold << '\n';
  if (s.oracle_objective) out << "oracle_objective=" << *s.oracle_objective << '\n';
  if (s.reduction_freq_only) {
    out << "reduction_freq_only=" << format_fixed(*s.reduction_freq_only, 6) << '\n';
  }
  if (s.reduction_recentness_only) {
    out << "reduction_recentness_only="
        << format_fixed(*s.reduction_recentness_only, 6) << '\n';
  }
  if (s.reduction_both) {
    out << "reduction_both=" << format_fixed(*s.reduction_both, 6) << '\n';
  }
  return out.str();
}

void write_report(const RunReport& report, const std::string& path) {
  auto emit = [](const std::string& p, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + p);
    body(f);
    if (!f) throw Error(ErrorCode::kIoError, "write failed for " + p);
  };
  emit(path, [&](std::ostream& o) { write_rows(o, report.rows); });
  emit(path + ".summary", [&](std::ostream& o) { o << summary_text(report); });
  if (report.config.mode == Mode::kSignificance) {
    emit(path + ".freq_only", [&](std::ostream& o) { write_rows(o, report.freq_only_rows); });
    emit(path + ".recentness_only",
         [&](std::ostream& o) { write_rows(o, report.recentness_only_rows); });
  }
}

std::vector<EpisodeRecord> read_rows(std::istream& in) {
  std::vector<EpisodeRecord> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;  // header
    auto body = trim(line);
    if (body.empty()) continue;
    auto p = split(body, ',');
    EpisodeRecord r;
    std::int64_t v[5];
    double ratio = 0.0;
    bool ok = p.size() == 10;
    if (ok) {
      std::int64_t ep = 0, f = 0, rec = 0, rw = 0;
      ok = parse_int(p[0], &ep) && parse_int(p[1], &v[0]) && parse_int(p[2], &v[1]) &&
           parse_int(p[3], &v[2]) && parse_double(p[4], &ratio) &&
           parse_double(p[5], &r.reduction) && parse_int(p[6], &f) &&
           parse_int(p[7], &rec) && parse_int(p[8], &rw) &&
           parse_double(p[9], &r.epsilon);
      r.episode = static_cast<int>(ep);
      r.metrics.overhead = v[0];
      r.metrics.hits = v[1];
      r.metrics.misses = v[2];
      r.metrics.total_lookups = v[1] + v[2];
      r.thresholds = {static_cast<int>(f), static_cast<int>(rec)};
      r.reward = static_cast<int>(rw);
    }
    if (!ok) {
      throw Error(ErrorCode::kParseError, "report line " + std::to_string(line_no));
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace flowrl
