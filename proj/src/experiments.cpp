#include "ctbn/experiments.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "ctbn/io.hpp"

namespace ctbn {

namespace {

struct Shape {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> slow;
};

const std::vector<Shape>& shapes() {
  static const std::vector<Shape> all = {
      {"chain3", {"A", "B", "C"}, {{"A", "B"}, {"B", "C"}}, {"A"}},
      {"chain5", {"A", "B", "C", "D", "E"}, {{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "E"}}, {"A"}},
      {"cycle5",
       {"A", "B", "C", "D", "E"},
       {{"A", "B"}, {"B", "C"}, {"C", "A"}, {"C", "D"}, {"D", "E"}},
       {"A", "B", "C"}},
      {"fork5", {"A", "B", "C", "D", "E"}, {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "E"}}, {"A"}},
      {"cycle-chain6",
       {"A", "B", "C", "D", "E", "F"},
       {{"A", "B"}, {"B", "C"}, {"C", "A"}, {"C", "D"}, {"D", "E"}, {"E", "F"}},
       {"A", "B", "C"}},
      // Three slow roots whose conjunction starts the ripple through D.
      {"complex9",
       {"A", "B", "C", "D", "E", "F", "G", "H", "I"},
       {{"A", "D"}, {"B", "D"}, {"C", "D"}, {"D", "E"}, {"D", "F"}, {"E", "G"}, {"F", "G"}, {"G", "H"}, {"H", "I"}},
       {"A", "B", "C"}},
  };
  return all;
}

const Shape& shape(const std::string& name) {
  for (const auto& s : shapes())
    if (s.name == name) return s;
  throw DomainError("unknown experiment '" + name + "'");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : shapes()) out.push_back(s.name);
    return out;
  }();
  return names;
}

DiGraph experiment_graph(const std::string& name) {
  const auto& s = shape(name);
  return DiGraph::from_edges(s.nodes, s.edges);
}

std::vector<std::string> experiment_slow_processes(const std::string& name) { return shape(name).slow; }

ReplicatorRates experiment_rates(const std::string& name) {
  ReplicatorRates r;
  // The AND of three independent roots at 1.0/5.0 is too short-lived to
  // stand out from D alone; the same 1:5 ratio five times slower does.
  if (shape(name).name == "complex9") {
    r.slow_up = 0.2;
    r.slow_down = 1.0;
  }
  return r;
}

CtbnModel experiment_model(const std::string& name, const std::optional<ReplicatorRates>& rates) {
  const auto& s = shape(name);
  if (name == "chain3" && !rates) return chain3_model();
  return build_replicator_ctbn(experiment_graph(name), s.slow, rates.value_or(experiment_rates(name)));
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (!(spec.alpha > 0.0)) throw DomainError("alpha must be positive");
  ExperimentResult out{spec, experiment_model(spec.name, spec.rates), {}, {}};

  ComparisonConfig config;
  config.alpha = spec.alpha;
  config.simulation = {spec.horizon(), spec.trajectories, spec.seed, spec.threads};
  config.fast_threshold = spec.fast_threshold;
  config.min_cascade_length = spec.min_cascade_length;
  config.max_active = spec.max_active;
  config.exact = spec.exact;
  out.comparison = compare_rednt_vs_naive(out.model, config);

  std::size_t saved = std::min(spec.saved_trajectories, spec.trajectories);
  for (std::size_t k = 0; k < saved; ++k) out.saved.push_back(ensemble_member(out.model, config.simulation, k));
  return out;
}

namespace {
std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParseError("cannot write " + p.string());
  return out;
}
}  // namespace

void write_bundle(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ParseError("cannot create " + dir.string() + ": " + ec.message());

  const auto& model = result.model;
  const auto& cmp = result.comparison;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < model.process_count(); ++j) names.push_back(model.name(j));

  save_model(dir / "model.json", model.data());
  {
    auto out = open_out(dir / "trajectories.csv");
    write_trajectories_csv(out, result.saved, names);
  }
  {
    auto out = open_out(dir / "sentry.csv");
    write_sentry_csv(out, cmp.ranking, model.state_space());
  }
  {
    auto out = open_out(dir / "naive.csv");
    std::vector<StateVector> order;
    for (auto x : cmp.naive_order) order.push_back(model.state_space().state(x));
    write_naive_csv(out, cmp.naive, order);
  }
  {
    auto out = open_out(dir / "cascades.csv");
    write_cascade_csv(out, result.saved, cmp.params);
  }
  {
    auto out = open_out(dir / "comparison.csv");
    write_comparison_csv(out, cmp.jaccard);
  }

  const auto& spec = result.spec;
  const auto& space = model.state_space();
  auto bits = [&](const std::vector<StateIndex>& order) {
    std::vector<std::string> out;
    for (auto x : order) out.push_back(state_bits(space.state(x)));
    return out;
  };
  nlohmann::ordered_json summary;
  summary["experiment"] = spec.name;
  summary["alpha"] = spec.alpha;
  summary["t_end"] = spec.horizon();
  summary["trajectories"] = spec.trajectories;
  summary["seed"] = spec.seed;
  summary["exact"] = spec.exact;
  summary["max_active"] = cmp.max_active;
  summary["fast_threshold"] = cmp.params.fast_threshold;
  summary["min_cascade_length"] = cmp.params.min_cascade_length;
  summary["cascades"] = cmp.naive.cascades;
  summary["rednt_order"] = bits(cmp.rednt_order);
  summary["naive_order"] = bits(cmp.naive_order);
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace ctbn
