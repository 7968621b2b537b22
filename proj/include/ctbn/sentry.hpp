#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ctbn/model.hpp"
#include "ctbn/simulator.hpp"
#include "ctbn/state_space.hpp"

namespace ctbn {

/// Lump-sum reward on transitions, instantaneous reward rate on states, and
/// the discount rate alpha > 0.
struct RewardSpec {
  std::function<double(const StateVector& from, const StateVector& to)> lump_sum;
  std::function<double(const StateVector& state)> instantaneous;
  double discount = 0.1;

  /// C = 1, R = 0: the reward counts transitions.
  static RewardSpec transition_count(double alpha);
  void validate() const;
};

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Mean and standard error of a sample (sample standard deviation / sqrt n).
/// A single sample has standard error 0.
Estimate summarize(const std::vector<double>& samples);

/// Discounted reward of one trajectory, truncated at its t_end.
double discounted_score(const Trajectory& trajectory, const RewardSpec& reward);

/// Monte Carlo estimate of the discounted reward from x; trajectory k is
/// seeded with derive_seed(config.master_seed, k).
Estimate discounted_reward_mc(const CtbnModel& model, const StateVector& x, const RewardSpec& reward,
                              const SimulationConfig& config);

/// Infinite-horizon discounted reward for every joint state, from the
/// first-step equations V(x) = (R(x) + sum_y q_xy (C(x,y) + V(y))) / (q_x + alpha).
std::vector<double> discounted_reward_exact(const CtbnModel& model, const RewardSpec& reward,
                                            StateIndex cap = kDefaultStateCap);

struct EdntEntry {
  StateIndex state = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t trajectories = 0;  // 0 for exact values
};

/// EDNT per state, sorted by state index. May cover a subset of the space.
class EdntTable {
 public:
  EdntTable() = default;
  explicit EdntTable(std::vector<EdntEntry> entries);
  /// Exact values for every state; standard errors are zero.
  static EdntTable from_exact(const std::vector<double>& values);

  const std::vector<EdntEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const EdntEntry* find(StateIndex state) const;
  /// Throws DomainError for states not in the table.
  const EdntEntry& at(StateIndex state) const;

 private:
  std::vector<EdntEntry> entries_;
};

/// Seed of trajectory k for the EDNT estimate of `state`.
constexpr std::uint64_t ednt_seed(std::uint64_t master, StateIndex state, std::size_t k) noexcept {
  return derive_seed(derive_seed(master, state), k);
}

/// EDNT estimate of one state from trajectories [first, first + count).
Estimate ednt_mc_state(const CtbnModel& model, StateIndex state, double alpha, double t_end,
                       std::uint64_t master_seed, std::size_t count, std::size_t first = 0);

/// Monte Carlo EDNT for the requested states (all states when empty).
/// Parallel over states with config.threads; results do not depend on the
/// thread count or on the order of `states`.
EdntTable ednt_mc(const CtbnModel& model, double alpha, const SimulationConfig& config,
                  std::vector<StateIndex> states = {});

/// Exact infinite-horizon EDNT by solving the first-step linear system over
/// the amalgamated chain.
std::vector<double> ednt_exact(const CtbnModel& model, double alpha, StateIndex cap = kDefaultStateCap);

struct RedntEntry {
  StateIndex state = 0;
  double rednt = 1.0;
  double ednt = 0.0;
  double ednt_stderr = 0.0;
  int active_alarms = 0;
  /// Some neighbour has EDNT 0 while this state does not: rednt is +inf.
  bool infinite = false;
  /// This state's EDNT is 0.
  bool degenerate = false;
};

/// REDNT per state, sorted by REDNT descending, ties by state index.
struct RedntRanking {
  std::vector<RedntEntry> entries;
  std::vector<int> cardinalities;

  const RedntEntry* find(StateIndex state) const;
};

/// REDNT(x) = max over x' in Ne(x) u {x} of EDNT(x) / EDNT(x'). Only states
/// whose whole neighbourhood is present in the table are ranked.
RedntRanking rednt(const EdntTable& ednt, const StateSpaceGraph& graph);

/// States with at most `max_active` active alarms, best first. Requires a
/// binary state space.
std::vector<StateIndex> rank_sentry_states(const RedntRanking& ranking, int max_active);

/// Every state with at most k active alarms, in index order (binary spaces).
std::vector<StateIndex> states_with_at_most(const StateSpace& space, int k);

/// Sorted union of `states` and all of their neighbours: the states whose
/// EDNT is needed to rank `states`.
std::vector<StateIndex> with_neighbors(const std::vector<StateIndex>& states, const StateSpaceGraph& graph);

enum class StopReason { converged, cap_reached };

struct StoppingResult {
  Estimate estimate;
  std::size_t trajectories_used = 0;
  StopReason reason = StopReason::cap_reached;
};

struct StoppingRule {
  double relative_halfwidth = 0.01;  // epsilon
  std::size_t batch = 1000;
  std::size_t max_trajectories = 1'000'000;
  double z = 1.96;  // 95% normal quantile
};

/// Samples EDNT(x) in batches until the confidence half-width divided by
/// the estimate drops below epsilon, or max_trajectories is reached. When
/// the estimate is 0 the half-width itself is compared with epsilon.
StoppingResult stopping_rule_ednt(const CtbnModel& model, StateIndex state, double alpha, double t_end,
                                  const StoppingRule& rule, std::uint64_t seed);

}  // namespace ctbn
