#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "ctbn/model.hpp"
#include "ctbn/sentry.hpp"
#include "ctbn/simulator.hpp"

namespace ctbn {

struct NaiveParams {
  double fast_threshold = 1.0;  // lambda_ft
  int min_cascade_length = 2;   // lambda_mcl, in events

  /// Throws DomainError unless lambda_ft > 0 and lambda_mcl >= 2.
  void validate() const;
};

/// Events [first_event, last_event] of a trajectory form one cascade.
struct CascadeWindow {
  std::size_t first_event = 0;
  std::size_t last_event = 0;
  /// State occupied just before first_event.
  StateVector sentry_state;

  std::size_t length() const noexcept { return last_event - first_event + 1; }
  bool operator==(const CascadeWindow&) const = default;
};

/// An event is fast when it follows the previous event (or t = 0, for the
/// first one) by less than lambda_ft. Cascades are the maximal runs of at
/// least lambda_mcl fast events. So the slow trigger of a ripple is not part
/// of it, and the state it produced is the sentry.
std::vector<CascadeWindow> identify_cascades(const Trajectory& trajectory, const NaiveParams& params);

struct NaiveStat {
  std::size_t count = 0;   // cascades started from the state
  std::size_t visits = 0;  // entries into the state, the initial state included

  double score() const noexcept { return visits == 0 ? 0.0 : static_cast<double>(count) / visits; }
};

struct NaiveScores {
  std::map<StateVector, NaiveStat> states;
  std::size_t cascades = 0;

  /// Adds one trajectory.
  void add(const Trajectory& trajectory, const NaiveParams& params);
  NaiveStat at(const StateVector& s) const;
};

NaiveScores naive_scores(const std::vector<Trajectory>& trajectories, const NaiveParams& params);

/// Median of the gaps between consecutive events of each trajectory, pooled
/// over the collection (mean of the middle two for an even count). Throws
/// DomainError when there is no such gap.
double default_fast_threshold(const std::vector<Trajectory>& trajectories);
double median(std::vector<double> values);

/// |top_k(a) n top_k(b)| / |top_k(a) u top_k(b)|. Throws DomainError when k
/// is 0 or either list is shorter than k.
double jaccard_at_k(const std::vector<StateIndex>& a, const std::vector<StateIndex>& b, std::size_t k);

/// `candidates` ordered by naive score, then count, both descending, then by
/// index.
std::vector<StateIndex> naive_ranking(const NaiveScores& scores, const StateSpace& space,
                                      const std::vector<StateIndex>& candidates);

struct ComparisonConfig {
  double alpha = 0.1;
  /// Used for the naive ensemble and, unless `exact`, for the EDNT estimates.
  SimulationConfig simulation{100.0, 10'000, 0, 1};
  std::optional<double> fast_threshold;  // median gap when unset
  int min_cascade_length = 2;
  std::optional<int> max_active;  // largest parent set when unset
  std::vector<std::size_t> k_values;  // 1..(filtered count) when empty
  bool exact = false;
};

struct ComparisonResult {
  std::vector<StateIndex> candidates;  // states with at most max_active alarms
  RedntRanking ranking;                // REDNT over candidates and their neighbors
  EdntTable ednt;
  std::vector<StateIndex> rednt_order;
  std::vector<StateIndex> naive_order;
  NaiveScores naive;
  NaiveParams params;
  int max_active = 0;
  std::vector<std::pair<std::size_t, double>> jaccard;
};

/// Ranks the low-alarm states by REDNT and by naive score on an ensemble
/// drawn from the model's initial distribution, and compares the two.
ComparisonResult compare_rednt_vs_naive(const CtbnModel& model, const ComparisonConfig& config);

}  // namespace ctbn
