#include "ctbn/sentry.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ctbn/parallel.hpp"

namespace ctbn {

RewardSpec RewardSpec::transition_count(double alpha) {
  return {[](const StateVector&, const StateVector&) { return 1.0; }, [](const StateVector&) { return 0.0; },
          alpha};
}

void RewardSpec::validate() const {
  if (!(discount > 0.0) || !std::isfinite(discount)) throw DomainError("discount must be positive");
  if (!lump_sum || !instantaneous) throw DomainError("reward functions must be set");
}

Estimate summarize(const std::vector<double>& samples) {
  Estimate e;
  e.samples = samples.size();
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double v : samples) sum += v;
  e.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) return e;
  double ss = 0.0;
  for (double v : samples) ss += (v - e.mean) * (v - e.mean);
  double variance = ss / static_cast<double>(samples.size() - 1);
  e.standard_error = std::sqrt(variance / static_cast<double>(samples.size()));
  return e;
}

double discounted_score(const Trajectory& trajectory, const RewardSpec& reward) {
  const double alpha = reward.discount;
  double score = 0.0;
  double segment_start = 0.0;
  StateVector state = trajectory.initial_state;
  StateVector previous = state;
  auto hold = [&](double until) {
    double r = reward.instantaneous(state);
    if (r != 0.0) score += r / alpha * (std::exp(-alpha * segment_start) - std::exp(-alpha * until));
  };
  for (const auto& e : trajectory.events) {
    hold(e.time);
    previous = state;
    state[e.process] = e.new_local_state;
    score += std::exp(-alpha * e.time) * reward.lump_sum(previous, state);
    segment_start = e.time;
  }
  hold(trajectory.t_end);
  return score;
}

Estimate discounted_reward_mc(const CtbnModel& model, const StateVector& x, const RewardSpec& reward,
                              const SimulationConfig& config) {
  reward.validate();
  config.validate();
  model.state_space().check(x);
  std::vector<double> scores(config.trajectory_count);
  parallel_for(config.trajectory_count, config.threads, [&](std::size_t k) {
    scores[k] = discounted_score(sample_trajectory(model, x, config.t_end, derive_seed(config.master_seed, k)),
                                 reward);
  });
  return summarize(scores);
}

std::vector<double> discounted_reward_exact(const CtbnModel& model, const RewardSpec& reward, StateIndex cap) {
  reward.validate();
  IntensityMatrix q = amalgamate(model, cap);
  const auto& space = model.state_space();
  const auto n = static_cast<Eigen::Index>(q.side());
  const double alpha = reward.discount;

  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs(n);
  const auto& rates = q.sparse();
  for (Eigen::Index x = 0; x < n; ++x) {
    StateVector from = space.state(static_cast<StateIndex>(x));
    double b = reward.instantaneous(from);
    for (IntensityMatrix::Storage::InnerIterator it(rates, x); it; ++it) {
      if (it.col() == x) {
        entries.emplace_back(x, x, -it.value() + alpha);
      } else {
        entries.emplace_back(x, it.col(), -it.value());
        b += it.value() * reward.lump_sum(from, space.state(static_cast<StateIndex>(it.col())));
      }
    }
    rhs[x] = b;
  }
  Sparse system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();
  Eigen::SparseLU<Sparse> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success) throw DomainError("discounted reward system is singular");
  Eigen::VectorXd v = solver.solve(rhs);
  return {v.data(), v.data() + v.size()};
}

EdntTable::EdntTable(std::vector<EdntEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.state < b.state; });
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].state == entries_[i - 1].state) throw DomainError("duplicate state in EDNT table");
}

EdntTable EdntTable::from_exact(const std::vector<double>& values) {
  std::vector<EdntEntry> entries;
  entries.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) entries.push_back({i, values[i], 0.0, 0});
  return EdntTable(std::move(entries));
}

const EdntEntry* EdntTable::find(StateIndex state) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), state,
                             [](const EdntEntry& e, StateIndex s) { return e.state < s; });
  return it != entries_.end() && it->state == state ? &*it : nullptr;
}

const EdntEntry& EdntTable::at(StateIndex state) const {
  const auto* e = find(state);
  if (!e) throw DomainError("state " + std::to_string(state) + " has no EDNT entry");
  return *e;
}

namespace {

std::vector<double> ednt_scores(const CtbnModel& model, StateIndex state, double alpha, double t_end,
                                std::uint64_t master_seed, std::size_t count, std::size_t first) {
  const StateVector start = model.state_space().state(state);
  std::vector<double> scores(count);
  StateVector s;
  for (std::size_t k = 0; k < count; ++k) {
    s = start;
    Rng rng(ednt_seed(master_seed, state, first + k));
    double score = 0.0;
    forward_sample(model, s, t_end, rng, [&](const Event& e) { score += std::exp(-alpha * e.time); });
    scores[k] = score;
  }
  return scores;
}

}  // namespace

Estimate ednt_mc_state(const CtbnModel& model, StateIndex state, double alpha, double t_end,
                       std::uint64_t master_seed, std::size_t count, std::size_t first) {
  if (!(alpha > 0.0)) throw DomainError("discount must be positive");
  return summarize(ednt_scores(model, state, alpha, t_end, master_seed, count, first));
}

EdntTable ednt_mc(const CtbnModel& model, double alpha, const SimulationConfig& config,
                  std::vector<StateIndex> states) {
  config.validate();
  if (!(alpha > 0.0)) throw DomainError("discount must be positive");
  if (states.empty()) {
    StateIndex n = model.state_space().size();
    if (n > kDefaultStateCap) throw CapacityError("too many states for a full EDNT table; request a subset");
    states.resize(n);
    for (StateIndex i = 0; i < n; ++i) states[i] = i;
  }
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  const StateIndex n = model.state_space().size();
  for (auto s : states)
    if (s >= n) throw DomainError("state index " + std::to_string(s) + " out of range");

  std::vector<EdntEntry> entries(states.size());
  parallel_for(states.size(), config.threads, [&](std::size_t i) {
    Estimate e = ednt_mc_state(model, states[i], alpha, config.t_end, config.master_seed, config.trajectory_count);
    entries[i] = {states[i], e.mean, e.standard_error, e.samples};
  });
  return EdntTable(std::move(entries));
}

std::vector<double> ednt_exact(const CtbnModel& model, double alpha, StateIndex cap) {
  return discounted_reward_exact(model, RewardSpec::transition_count(alpha), cap);
}

const RedntEntry* RedntRanking::find(StateIndex state) const {
  for (const auto& e : entries)
    if (e.state == state) return &e;
  return nullptr;
}

RedntRanking rednt(const EdntTable& ednt, const StateSpaceGraph& graph) {
  RedntRanking out;
  out.cardinalities.assign(graph.space().cardinalities().begin(), graph.space().cardinalities().end());
  for (const auto& entry : ednt.entries()) {
    auto neighbors = graph.neighbors(entry.state);
    bool covered = std::all_of(neighbors.begin(), neighbors.end(),
                               [&](StateIndex y) { return ednt.find(y) != nullptr; });
    if (!covered) continue;

    RedntEntry r;
    r.state = entry.state;
    r.ednt = entry.estimate;
    r.ednt_stderr = entry.standard_error;
    r.active_alarms = active_alarm_count(graph.space().state(entry.state));
    r.degenerate = entry.estimate == 0.0;
    r.rednt = 1.0;  // x is in its own neighbourhood
    for (StateIndex y : neighbors) {
      double other = ednt.find(y)->estimate;
      if (other == 0.0) {
        if (entry.estimate > 0.0) r.infinite = true;
        continue;
      }
      r.rednt = std::max(r.rednt, entry.estimate / other);
    }
    if (r.infinite) r.rednt = std::numeric_limits<double>::infinity();
    out.entries.push_back(r);
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const RedntEntry& a, const RedntEntry& b) {
    if (a.rednt != b.rednt) return a.rednt > b.rednt;
    return a.state < b.state;
  });
  return out;
}

std::vector<StateIndex> rank_sentry_states(const RedntRanking& ranking, int max_active) {
  for (int c : ranking.cardinalities)
    if (c != 2) throw DomainError("active-alarm filtering needs binary processes");
  std::vector<StateIndex> out;
  for (const auto& e : ranking.entries)
    if (e.active_alarms <= max_active) out.push_back(e.state);
  return out;
}

std::vector<StateIndex> states_with_at_most(const StateSpace& space, int k) {
  if (!space.binary()) throw DomainError("active-alarm filtering needs binary processes");
  const std::size_t n = space.process_count();
  space.size();  // throws when not indexable
  std::vector<StateIndex> out;
  std::vector<std::size_t> chosen;
  auto recurse = [&](auto&& self, std::size_t from, StateIndex index) -> void {
    out.push_back(index);
    if (static_cast<int>(chosen.size()) == k) return;
    for (std::size_t j = from; j < n; ++j) {
      chosen.push_back(j);
      self(self, j + 1, index + space.stride(j));
      chosen.pop_back();
    }
  };
  if (k >= 0) recurse(recurse, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StateIndex> with_neighbors(const std::vector<StateIndex>& states, const StateSpaceGraph& graph) {
  std::vector<StateIndex> out(states);
  for (auto s : states) {
    auto ns = graph.neighbors(s);
    out.insert(out.end(), ns.begin(), ns.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StoppingResult stopping_rule_ednt(const CtbnModel& model, StateIndex state, double alpha, double t_end,
                                  const StoppingRule& rule, std::uint64_t seed) {
  if (!(rule.relative_halfwidth > 0.0)) throw DomainError("epsilon must be positive");
  if (rule.batch < 1 || rule.max_trajectories < 1) throw DomainError("batch and cap must be positive");
  if (!(alpha > 0.0)) throw DomainError("discount must be positive");

  std::vector<double> scores;
  StoppingResult result;
  while (scores.size() < rule.max_trajectories) {
    std::size_t count = std::min(rule.batch, rule.max_trajectories - scores.size());
    auto batch = ednt_scores(model, state, alpha, t_end, seed, count, scores.size());
    scores.insert(scores.end(), batch.begin(), batch.end());
    result.estimate = summarize(scores);
    if (scores.size() < 2) continue;
    double halfwidth = rule.z * result.estimate.standard_error;
    double mean = std::abs(result.estimate.mean);
    bool done = mean > 0.0 ? halfwidth / mean < rule.relative_halfwidth : halfwidth < rule.relative_halfwidth;
    if (done) {
      result.reason = StopReason::converged;
      result.trajectories_used = scores.size();
      return result;
    }
  }
  result.estimate = summarize(scores);
  result.trajectories_used = scores.size();
  result.reason = StopReason::cap_reached;
  return result;
}

}  // namespace ctbn
