#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctbn/cascade.hpp"
#include "ctbn/graph.hpp"
#include "ctbn/model.hpp"

namespace ctbn {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

/// chain3, chain5, cycle5, fork5, cycle-chain6, complex9.
const std::vector<std::string>& experiment_names();

/// Network shape of a built-in experiment. Throws DomainError for unknown
/// names.
DiGraph experiment_graph(const std::string& name);
std::vector<std::string> experiment_slow_processes(const std::string& name);
ReplicatorRates experiment_rates(const std::string& name);

/// chain3 gets the published CIMs unless rates are overridden; the other
/// shapes are replicator networks.
CtbnModel experiment_model(const std::string& name, const std::optional<ReplicatorRates>& rates = std::nullopt);

struct ExperimentSpec {
  std::string name = "chain3";
  std::optional<ReplicatorRates> rates;
  double alpha = 0.1;
  std::optional<double> t_end;  // 10 / alpha
  std::size_t trajectories = 10'000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> max_active;
  std::optional<double> fast_threshold;
  int min_cascade_length = 2;
  std::size_t saved_trajectories = 20;
  bool exact = false;
  unsigned threads = 1;

  double horizon() const { return t_end.value_or(10.0 / alpha); }
};

struct ExperimentResult {
  ExperimentSpec spec;
  CtbnModel model;
  ComparisonResult comparison;
  std::vector<Trajectory> saved;  // the first spec.saved_trajectories members of the ensemble
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes model.json, trajectories.csv, sentry.csv, naive.csv, cascades.csv,
/// comparison.csv and summary.json into `dir` (created if missing). Output depends only on
/// the result, so equal seeds give byte-identical bundles.
void write_bundle(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace ctbn
