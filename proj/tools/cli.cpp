#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "ctbn/cascade.hpp"
#include "ctbn/experiments.hpp"
#include "ctbn/graph.hpp"
#include "ctbn/io.hpp"
#include "ctbn/parallel.hpp"
#include "ctbn/sentry.hpp"
#include "ctbn/simulator.hpp"
#include "ctbn/state_space.hpp"

namespace ctbn::cli {

namespace {

// --config reader. Nested objects address subcommands ({"sentry": {"alpha":
// 0.05}}); top-level scalars go to whichever subcommand was invoked, so one
// flat file per command also works.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* app) : app_(app) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConversionError("writing a config file is not supported");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc;
    try {
      input >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, active_path(), items);
    return items;
  }

 private:
  std::vector<std::string> active_path() const {
    std::vector<std::string> path;
    const CLI::App* app = app_;
    for (;;) {
      auto subs = app->get_subcommands();
      if (subs.empty()) break;
      app = subs.front();
      path.push_back(app->get_name());
    }
    return path;
  }

  void collect(const nlohmann::json& object, const std::vector<std::string>& active,
               std::vector<CLI::ConfigItem>& items, std::vector<std::string> parents = {}) const {
    for (auto it = object.begin(); it != object.end(); ++it) {
      const auto& v = it.value();
      if (v.is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(v, active, items, nested);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents.empty() ? active : parents;
      item.name = it.key();
      if (v.is_array()) {
        for (const auto& e : v) item.inputs.push_back(scalar(e, it.key()));
      } else {
        item.inputs.push_back(scalar(v, it.key()));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported value for '" + key + "'");
  }

  const CLI::App* app_;
};

std::vector<std::string> process_names(const CtbnModel& model) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < model.process_count(); ++j) names.push_back(model.name(j));
  return names;
}

CtbnModel load_with_warnings(const std::string& path, std::ostream& err) {
  LoadedModel loaded = read_model_file(path);
  for (const auto& w : loaded.warnings) err << violation_json(w) << '\n';
  return CtbnModel(std::move(loaded.data));
}

StateVector parse_initial(const std::string& text, const CtbnModel& model) {
  StateVector s;
  try {
    s = parse_state_bits(text);
  } catch (const ParseError& e) {
    throw DomainError(std::string("invalid initial state: ") + e.what());
  }
  model.state_space().check(s);
  return s;
}

std::ofstream open_file(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  return out;
}

// Writes to `path`, or to `out` when the path is empty.
template <class Write>
void emit(const std::string& path, std::ostream& out, Write&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  auto file = open_file(path);
  write(file);
  if (!file) throw ParseError("cannot write " + path);
}

struct SimulateArgs {
  std::string model;
  std::string initial;
  double t_end = 10.0;
  std::size_t trajectories = 1;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  bool concatenate = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  CtbnModel model = load_with_warnings(a.model, err);
  if (!std::isfinite(a.t_end) || a.t_end < 0.0) throw DomainError("t_end must be finite and non-negative");
  std::optional<StateVector> initial;
  if (!a.initial.empty()) initial = parse_initial(a.initial, model);

  SimulationConfig config{a.t_end, a.trajectories, a.seed, 1};
  std::vector<Trajectory> trajectories;
  for (std::size_t k = 0; k < a.trajectories; ++k)
    trajectories.push_back(initial ? sample_trajectory(model, *initial, a.t_end, derive_seed(a.seed, k))
                                   : ensemble_member(model, config, k));
  auto names = process_names(model);

  if (a.concatenate || (a.out.empty() && trajectories.size() > 1)) {
    emit(a.out, out, [&](std::ostream& os) { write_trajectories_csv(os, trajectories, names); });
    return 0;
  }
  if (a.out.empty()) {
    write_trajectory_csv(out, trajectories.front(), names);
    return 0;
  }
  // One file per trajectory inside the directory a.out.
  std::filesystem::create_directories(a.out);
  const int width = static_cast<int>(std::to_string(trajectories.size() - 1).size());
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    std::ostringstream name;
    name << "trajectory_" << std::setw(width) << std::setfill('0') << k << ".csv";
    auto file = open_file((std::filesystem::path(a.out) / name.str()).string());
    write_trajectory_csv(file, trajectories[k], names);
  }
  return 0;
}

struct SentryArgs {
  std::string model;
  double alpha = 0.1;
  std::optional<double> t_end;
  std::size_t trajectories = 10'000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> max_active;
  bool exact = false;
  std::optional<double> epsilon;
  std::size_t batch = 1000;
  std::size_t cap = 1'000'000;
  unsigned threads = 1;
  std::string out;
};

int cmd_sentry(const SentryArgs& a, std::ostream& out, std::ostream& err) {
  CtbnModel model = load_with_warnings(a.model, err);
  if (!(a.alpha > 0.0)) throw DomainError("alpha must be positive");
  const double t_end = a.t_end.value_or(10.0 / a.alpha);
  if (a.max_active && !model.binary()) throw DomainError("--max-active needs binary processes");

  StateSpaceGraph graph = build_state_space_graph(model, StateIndex{1} << 62);
  EdntTable table;
  if (a.exact) {
    table = EdntTable::from_exact(ednt_exact(model, a.alpha));
  } else {
    std::vector<StateIndex> states;
    if (a.max_active) {
      states = with_neighbors(states_with_at_most(model.state_space(), *a.max_active), graph);
    } else {
      if (model.state_space().size() > kDefaultStateCap)
        throw CapacityError("state space too large for a full table; use --max-active");
      for (StateIndex x = 0; x < model.state_space().size(); ++x) states.push_back(x);
    }
    if (a.epsilon) {
      StoppingRule rule{*a.epsilon, a.batch, a.cap};
      std::vector<EdntEntry> entries(states.size());
      std::vector<StopReason> reasons(states.size());
      parallel_for(states.size(), a.threads, [&](std::size_t i) {
        auto r = stopping_rule_ednt(model, states[i], a.alpha, t_end, rule, a.seed);
        entries[i] = {states[i], r.estimate.mean, r.estimate.standard_error, r.trajectories_used};
        reasons[i] = r.reason;
      });
      std::size_t capped = std::count(reasons.begin(), reasons.end(), StopReason::cap_reached);
      if (capped > 0) err << capped << " state(s) stopped at the trajectory cap before reaching epsilon\n";
      table = EdntTable(std::move(entries));
    } else {
      table = ednt_mc(model, a.alpha, SimulationConfig{t_end, a.trajectories, a.seed, a.threads}, states);
    }
  }

  RedntRanking ranking = rednt(table, graph);
  if (a.max_active) {
    std::erase_if(ranking.entries, [&](const RedntEntry& e) { return e.active_alarms > *a.max_active; });
  }
  std::size_t degenerate = 0, infinite = 0;
  for (const auto& e : ranking.entries) {
    degenerate += e.degenerate;
    infinite += e.infinite;
  }
  if (degenerate) err << degenerate << " state(s) have EDNT 0 (degenerate)\n";
  if (infinite) err << infinite << " state(s) have a zero-EDNT neighbour; REDNT reported as inf\n";
  emit(a.out, out, [&](std::ostream& os) { write_sentry_csv(os, ranking, model.state_space()); });
  return 0;
}

struct CascadeArgs {
  std::string trajectories;
  std::optional<double> fast_threshold;
  bool auto_threshold = false;
  int min_length = 2;
  std::optional<int> max_active;
  bool naive = false;
  std::string out;
};

int cmd_cascades(const CascadeArgs& a, std::ostream& out) {
  TrajectoryFile file = read_trajectories_file(a.trajectories);
  NaiveParams params;
  params.min_cascade_length = a.min_length;
  if (file.trajectories.empty()) {
    params.fast_threshold = a.fast_threshold.value_or(1.0);
  } else {
    params.fast_threshold = a.fast_threshold ? *a.fast_threshold : default_fast_threshold(file.trajectories);
  }
  params.validate();

  NaiveScores scores = naive_scores(file.trajectories, params);
  std::vector<StateVector> order;
  for (const auto& [s, stat] : scores.states)
    if (!a.max_active || active_alarm_count(s) <= *a.max_active) order.push_back(s);
  std::stable_sort(order.begin(), order.end(), [&](const StateVector& x, const StateVector& y) {
    NaiveStat sx = scores.at(x), sy = scores.at(y);
    if (sx.score() != sy.score()) return sx.score() > sy.score();
    return sx.count > sy.count;
  });

  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    auto c = open_file((std::filesystem::path(a.out) / "cascades.csv").string());
    write_cascade_csv(c, file.trajectories, params);
    auto n = open_file((std::filesystem::path(a.out) / "naive.csv").string());
    write_naive_csv(n, scores, order);
    return 0;
  }
  if (a.naive)
    write_naive_csv(out, scores, order);
  else
    write_cascade_csv(out, file.trajectories, params);
  return 0;
}

struct GraphArgs {
  std::string input;
  std::string partition;
  std::vector<std::string> a, b, c;
  std::string out;
  bool state_space = false;
};

NodeSet lookup(const DiGraph& g, const std::vector<std::string>& names) { return g.ids(names); }

int cmd_graph(const std::string& which, const GraphArgs& a, std::ostream& out) {
  DiGraph g = read_graph_file(a.input);
  std::string text;
  if (which == "dot") {
    if (a.state_space) {
      text = state_space_dot(build_state_space_graph(load_model(a.input)));
    } else {
      text = to_dot(g);
    }
  } else if (which == "moralize") {
    text = to_dot(moralize(g));
  } else if (which == "condense") {
    GraphPartition cond = condensation(g);
    text = partition_dot(cond, "condensation");
  } else if (which == "partition") {
    text = partition_dot(read_partition_file(a.partition, g));
  } else if (which == "separate") {
    if (a.partition.empty()) {
      text = certificate_json(ctbn_independent(g, lookup(g, a.a), lookup(g, a.b), lookup(g, a.c)), g) + "\n";
    } else {
      GraphPartition p = read_partition_file(a.partition, g);
      auto cert = partition_independent(p, lookup(p.graph, a.a), lookup(p.graph, a.b), lookup(p.graph, a.c));
      text = certificate_json(cert, p, g) + "\n";
    }
  } else if (which == "scc") {
    // --a and --b name one node inside each block.
    if (a.a.size() != 1 || a.b.size() != 1) throw DomainError("scc needs one node for --a and one for --b");
    GraphPartition cond = condensation(g);
    auto cert = nonadjacent_scc_independence(g, cond, cond.block_of[g.id(a.a[0])], cond.block_of[g.id(a.b[0])]);
    text = certificate_json(cert, cond, g) + "\n";
  } else if (which == "ancestral") {
    CtbnModel model = load_model(a.input);
    text = model_json(ancestral_subprocess(model, lookup(g, a.a)).data());
  }
  emit(a.out, out, [&](std::ostream& os) { os << text; });
  return 0;
}

struct ExperimentArgs {
  std::string name;
  std::string out;
  ExperimentSpec spec;
  std::optional<double> slow_up, slow_down, fast, base;
};

int cmd_experiment(ExperimentArgs a, std::ostream& out) {
  if (a.slow_up || a.slow_down || a.fast || a.base) {
    ReplicatorRates r = experiment_rates(a.name);
    if (a.slow_up) r.slow_up = *a.slow_up;
    if (a.slow_down) r.slow_down = *a.slow_down;
    if (a.fast) r.fast = *a.fast;
    if (a.base) r.base = *a.base;
    a.spec.rates = r;
  }
  a.spec.name = a.name;
  ExperimentResult result = run_experiment(a.spec);
  write_bundle(result, a.out);

  const auto& cmp = result.comparison;
  const auto& space = result.model.state_space();
  out << "experiment " << a.name << ": " << cmp.naive.cascades << " cascades, fast threshold "
      << format_double(cmp.params.fast_threshold) << ", max active " << cmp.max_active << '\n';
  for (std::size_t i = 0; i < std::min<std::size_t>(3, cmp.rednt_order.size()); ++i) {
    const auto* e = cmp.ranking.find(cmp.rednt_order[i]);
    out << "  rednt #" << i + 1 << ' ' << state_bits(space.state(e->state)) << ' ' << format_double(e->rednt)
        << "   naive #" << i + 1 << ' ' << state_bits(space.state(cmp.naive_order[i])) << '\n';
  }
  for (const auto& [k, j] : cmp.jaccard)
    if (k <= 3) out << "  jaccard@" << k << ' ' << format_double(j) << '\n';
  out << "bundle written to " << a.out << '\n';
  return 0;
}

int cmd_model(const std::string& name, bool list, const std::string& path, std::ostream& out) {
  if (list) {
    for (const auto& n : experiment_names()) out << n << '\n';
    return 0;
  }
  if (name.empty()) throw DomainError("model name required (see --list)");
  std::string text = model_json(experiment_model(name).data());
  emit(path, out, [&](std::ostream& os) { os << text; });
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-time Bayesian network toolkit: simulation, sentry states, cascades, graph queries"};
  app.name("ctbn");
  app.require_subcommand(1);
  app.set_config("--config", "", "JSON file with option values; command-line flags override it");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  // validate
  std::string validate_path;
  bool strict = false;
  auto* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("model", validate_path, "Model JSON")->required();
  validate->add_flag("--strict", strict, "Reject unknown fields");

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Forward-sample trajectories");
  simulate->add_option("model", sim.model, "Model JSON")->required();
  simulate->add_option("--initial", sim.initial, "Initial state, e.g. 100 (default: the model's)");
  simulate->add_option("--t-end", sim.t_end, "Trajectory length")->capture_default_str();
  simulate->add_option("--trajectories", sim.trajectories, "Number of trajectories")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory (or file with --concatenate); default stdout");
  simulate->add_flag("--concatenate", sim.concatenate, "One CSV with a trajectory_id column");

  // sentry
  SentryArgs sen;
  auto* sentry = app.add_subcommand("sentry", "EDNT / REDNT report");
  sentry->add_option("model", sen.model, "Model JSON")->required();
  sentry->add_option("--alpha", sen.alpha, "Discount rate")->capture_default_str();
  sentry->add_option("--t-end", sen.t_end, "Trajectory length (default 10/alpha)");
  sentry->add_option("--trajectories", sen.trajectories, "Trajectories per state")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sentry->add_option("--seed", sen.seed, "Master seed")->capture_default_str();
  sentry->add_option("--max-active", sen.max_active, "Only states with at most this many active alarms")
      ->check(CLI::NonNegativeNumber);
  sentry->add_flag("--exact", sen.exact, "Solve the linear system instead of sampling");
  auto* eps = sentry->add_option("--epsilon", sen.epsilon, "Sample each state until the relative 95% half-width is below this");
  sentry->add_option("--batch", sen.batch, "Batch size for --epsilon")->capture_default_str()->check(CLI::PositiveNumber);
  sentry->add_option("--cap", sen.cap, "Trajectory cap for --epsilon")->capture_default_str()->check(CLI::PositiveNumber);
  sentry->add_option("--threads", sen.threads, "Worker threads")->capture_default_str();
  sentry->add_option("--out", sen.out, "Output CSV (default stdout)");
  eps->excludes(sentry->get_option("--exact"));

  // cascades
  CascadeArgs cas;
  auto* cascades = app.add_subcommand("cascades", "Naive cascade identification and scores");
  cascades->add_option("trajectories", cas.trajectories, "Trajectory CSV")->required();
  auto* ft = cascades->add_option("--fast-threshold", cas.fast_threshold, "Fast threshold")->check(CLI::PositiveNumber);
  auto* at = cascades->add_flag("--auto-threshold", cas.auto_threshold, "Median inter-event gap (the default)");
  ft->excludes(at);
  cascades->add_option("--min-length", cas.min_length, "Minimum cascade length in events")
      ->capture_default_str()
      ->check(CLI::Range(2, std::numeric_limits<int>::max()));
  cascades->add_option("--max-active", cas.max_active, "Naive report: states with at most this many active alarms");
  cascades->add_flag("--naive", cas.naive, "Print the naive-score report instead of the cascade list");
  cascades->add_option("--out", cas.out, "Directory for cascades.csv and naive.csv");

  // graph
  GraphArgs gra;
  auto* graph = app.add_subcommand("graph", "Graph queries on a model or graph file");
  graph->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> graph_cmds;
  auto add_graph = [&](const std::string& name, const std::string& help) {
    auto* sub = graph->add_subcommand(name, help);
    sub->add_option("input", gra.input, "Model JSON or graph JSON")->required();
    sub->add_option("--out", gra.out, "Output file (default stdout)");
    graph_cmds.emplace_back(name, sub);
    return sub;
  };
  add_graph("dot", "DOT of the CTBN graph")->add_flag("--state-space", gra.state_space, "DOT of the state-space graph");
  add_graph("moralize", "DOT of the moral graph");
  add_graph("condense", "DOT of the condensation");
  add_graph("partition", "DOT of a graph partition")->add_option("--partition", gra.partition, "Partition JSON")->required();
  {
    auto* sep = add_graph("separate", "Conditional-independence certificate (JSON)");
    sep->add_option("--a", gra.a, "Set A")->delimiter(',');
    sep->add_option("--b", gra.b, "Set B")->delimiter(',');
    sep->add_option("--c", gra.c, "Set C")->delimiter(',');
    sep->add_option("--partition", gra.partition, "Evaluate on this partition; sets name blocks");
  }
  {
    auto* scc = add_graph("scc", "Separating set for two nonadjacent strongly connected components");
    scc->add_option("--a", gra.a, "A node of the first component")->required();
    scc->add_option("--b", gra.b, "A node of the second component")->required();
  }
  add_graph("ancestral", "Sub-model on an ancestral process set")
      ->add_option("--set", gra.a, "Process set")
      ->delimiter(',')
      ->required();

  // experiment
  ExperimentArgs exa;
  auto* experiment = app.add_subcommand("experiment", "Run a built-in experiment and write its report bundle");
  experiment->add_option("name", exa.name, "Experiment")->required()->check(CLI::IsMember(experiment_names()));
  experiment->add_option("--out", exa.out, "Bundle directory")->required();
  experiment->add_option("--alpha", exa.spec.alpha, "Discount rate")->capture_default_str();
  experiment->add_option("--t-end", exa.spec.t_end, "Trajectory length (default 10/alpha)");
  experiment->add_option("--trajectories", exa.spec.trajectories, "Ensemble size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  experiment->add_option("--seed", exa.spec.seed, "Master seed")->capture_default_str();
  experiment->add_option("--max-active", exa.spec.max_active, "Active-alarm cap (default: largest parent set)");
  experiment->add_option("--fast-threshold", exa.spec.fast_threshold, "Fast threshold (default: median gap)");
  experiment->add_option("--min-length", exa.spec.min_cascade_length, "Minimum cascade length")
      ->capture_default_str()
      ->check(CLI::Range(2, std::numeric_limits<int>::max()));
  experiment->add_option("--save", exa.spec.saved_trajectories, "Trajectories stored in the bundle")->capture_default_str();
  experiment->add_flag("--exact", exa.spec.exact, "Exact EDNT instead of Monte Carlo");
  experiment->add_option("--threads", exa.spec.threads, "Worker threads")->capture_default_str();
  experiment->add_option("--slow-up", exa.slow_up, "Slow 0->1 rate");
  experiment->add_option("--slow-down", exa.slow_down, "Slow 1->0 rate");
  experiment->add_option("--fast", exa.fast, "Fast rate");
  experiment->add_option("--base", exa.base, "Base rate");

  // model
  std::string model_name, model_out;
  bool model_list = false;
  auto* model = app.add_subcommand("model", "Export a built-in model as JSON");
  model->add_option("name", model_name, "Experiment name");
  model->add_flag("--list", model_list, "List built-in models");
  model->add_option("--out", model_out, "Output file (default stdout)");

  try {
    // --config belongs to the top-level app; accept it anywhere on the line.
    std::vector<std::string> ordered;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        ordered.push_back(args[i]);
        ordered.push_back(args[++i]);
      } else if (args[i].rfind("--config=", 0) == 0) {
        ordered.push_back(args[i]);
      } else {
        rest.push_back(args[i]);
      }
    }
    ordered.insert(ordered.end(), rest.begin(), rest.end());
    std::vector<std::string> reversed(ordered.rbegin(), ordered.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      LoadedModel loaded = read_model_file(validate_path, {strict, true});
      for (const auto& w : loaded.warnings) err << violation_json(w) << '\n';
      auto violations = validate_model(loaded.data);
      for (const auto& v : violations) out << violation_json(v) << '\n';
      return violations.empty() ? 0 : 1;
    }
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (sentry->parsed()) return cmd_sentry(sen, out, err);
    if (cascades->parsed()) return cmd_cascades(cas, out);
    if (graph->parsed())
      for (const auto& [name, sub] : graph_cmds)
        if (sub->parsed()) return cmd_graph(name, gra, out);
    if (experiment->parsed()) return cmd_experiment(exa, out);
    if (model->parsed()) return cmd_model(model_name, model_list, model_out, out);
  } catch (const InvalidModel& e) {
    for (const auto& v : e.violations()) out << violation_json(v) << '\n';
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace ctbn::cli
