#include "ctbn/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "ctbn/parallel.hpp"
#include "ctbn/state_space.hpp"

namespace ctbn {

void NaiveParams::validate() const {
  if (!(fast_threshold > 0.0)) throw DomainError("fast threshold must be positive");
  if (min_cascade_length < 2) throw DomainError("minimum cascade length must be at least 2");
}

std::vector<CascadeWindow> identify_cascades(const Trajectory& trajectory, const NaiveParams& params) {
  params.validate();
  const auto& events = trajectory.events;
  std::vector<CascadeWindow> out;
  StateVector state = trajectory.initial_state;
  StateVector before_run;
  std::size_t run_start = 0, run_length = 0;
  double previous = 0.0;

  auto close_run = [&](std::size_t end) {
    if (run_length >= static_cast<std::size_t>(params.min_cascade_length))
      out.push_back({run_start, end - 1, before_run});
    run_length = 0;
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    bool fast = events[i].time - previous < params.fast_threshold;
    if (!fast) close_run(i);
    if (fast) {
      if (run_length == 0) {
        run_start = i;
        before_run = state;
      }
      ++run_length;
    }
    state[events[i].process] = events[i].new_local_state;
    previous = events[i].time;
  }
  close_run(events.size());
  return out;
}

void NaiveScores::add(const Trajectory& trajectory, const NaiveParams& params) {
  StateVector s = trajectory.initial_state;
  ++states[s].visits;
  for (const auto& e : trajectory.events) {
    s[e.process] = e.new_local_state;
    ++states[s].visits;
  }
  for (const auto& w : identify_cascades(trajectory, params)) {
    ++states[w.sentry_state].count;
    ++cascades;
  }
}

NaiveStat NaiveScores::at(const StateVector& s) const {
  auto it = states.find(s);
  return it == states.end() ? NaiveStat{} : it->second;
}

NaiveScores naive_scores(const std::vector<Trajectory>& trajectories, const NaiveParams& params) {
  params.validate();
  NaiveScores out;
  for (const auto& t : trajectories) out.add(t, params);
  return out;
}

namespace {
void append_gaps(const Trajectory& t, std::vector<double>& gaps) {
  for (std::size_t i = 1; i < t.events.size(); ++i) gaps.push_back(t.events[i].time - t.events[i - 1].time);
}
}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double default_fast_threshold(const std::vector<Trajectory>& trajectories) {
  std::vector<double> gaps;
  for (const auto& t : trajectories) append_gaps(t, gaps);
  if (gaps.empty()) throw DomainError("need two consecutive events to choose a fast threshold");
  return median(std::move(gaps));
}

double jaccard_at_k(const std::vector<StateIndex>& a, const std::vector<StateIndex>& b, std::size_t k) {
  if (k == 0) throw DomainError("k must be at least 1");
  if (a.size() < k || b.size() < k) throw DomainError("ranking shorter than k");
  std::vector<StateIndex> ta(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<StateIndex> tb(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  ta.erase(std::unique(ta.begin(), ta.end()), ta.end());
  tb.erase(std::unique(tb.begin(), tb.end()), tb.end());
  std::vector<StateIndex> common, all;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  std::set_union(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(all));
  return static_cast<double>(common.size()) / static_cast<double>(all.size());
}

std::vector<StateIndex> naive_ranking(const NaiveScores& scores, const StateSpace& space,
                                      const std::vector<StateIndex>& candidates) {
  struct Row {
    StateIndex state;
    NaiveStat stat;
  };
  std::vector<Row> rows;
  for (auto x : candidates) rows.push_back({x, scores.at(space.state(x))});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    double sa = a.stat.score(), sb = b.stat.score();
    if (sa != sb) return sa > sb;
    if (a.stat.count != b.stat.count) return a.stat.count > b.stat.count;
    return a.state < b.state;
  });
  std::vector<StateIndex> out;
  for (const auto& r : rows) out.push_back(r.state);
  return out;
}

namespace {

// Trajectories are processed in fixed chunks whose partial results are
// merged in chunk order, so the outcome ignores the thread count.
constexpr std::size_t kChunk = 256;

template <class PerChunk, class Merge>
void over_ensemble(const CtbnModel& model, const SimulationConfig& config, PerChunk&& per_chunk, Merge&& merge) {
  const std::size_t n = config.trajectory_count;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  using Partial = decltype(per_chunk(std::size_t{0}, std::size_t{0}, model));
  for (std::size_t first = 0; first < chunks; first += std::max<std::size_t>(1, config.threads)) {
    std::size_t batch = std::min<std::size_t>(std::max<std::size_t>(1, config.threads), chunks - first);
    std::vector<Partial> partial(batch);
    parallel_for(batch, config.threads, [&](std::size_t i) {
      std::size_t begin = (first + i) * kChunk;
      partial[i] = per_chunk(begin, std::min(n, begin + kChunk), model);
    });
    for (auto& p : partial) merge(p);
  }
}

}  // namespace

ComparisonResult compare_rednt_vs_naive(const CtbnModel& model, const ComparisonConfig& config) {
  config.simulation.validate();
  if (!model.binary()) throw DomainError("cascade comparison needs binary processes");
  ComparisonResult out;
  out.max_active = config.max_active.value_or(static_cast<int>(model.max_parent_count()));
  if (out.max_active < 0) throw DomainError("max_active must be non-negative");

  const auto& sim = config.simulation;
  if (config.fast_threshold) {
    out.params.fast_threshold = *config.fast_threshold;
  } else {
    std::vector<double> gaps;
    over_ensemble(
        model, sim,
        [&](std::size_t begin, std::size_t end, const CtbnModel& m) {
          std::vector<double> g;
          for (std::size_t k = begin; k < end; ++k) append_gaps(ensemble_member(m, sim, k), g);
          return g;
        },
        [&](std::vector<double>& g) { gaps.insert(gaps.end(), g.begin(), g.end()); });
    if (gaps.empty()) throw DomainError("need two consecutive events to choose a fast threshold");
    out.params.fast_threshold = median(std::move(gaps));
  }
  out.params.min_cascade_length = config.min_cascade_length;
  out.params.validate();

  over_ensemble(
      model, sim,
      [&](std::size_t begin, std::size_t end, const CtbnModel& m) {
        NaiveScores s;
        for (std::size_t k = begin; k < end; ++k) s.add(ensemble_member(m, sim, k), out.params);
        return s;
      },
      [&](NaiveScores& s) {
        for (const auto& [state, stat] : s.states) {
          auto& mine = out.naive.states[state];
          mine.count += stat.count;
          mine.visits += stat.visits;
        }
        out.naive.cascades += s.cascades;
      });

  StateSpaceGraph graph = build_state_space_graph(model, StateIndex{1} << 62);
  out.candidates = states_with_at_most(model.state_space(), out.max_active);
  if (config.exact) {
    out.ednt = EdntTable::from_exact(ednt_exact(model, config.alpha));
  } else {
    out.ednt = ednt_mc(model, config.alpha, sim, with_neighbors(out.candidates, graph));
  }
  out.ranking = rednt(out.ednt, graph);
  out.rednt_order = rank_sentry_states(out.ranking, out.max_active);
  out.naive_order = naive_ranking(out.naive, model.state_space(), out.candidates);

  std::vector<std::size_t> ks = config.k_values;
  if (ks.empty())
    for (std::size_t k = 1; k <= out.candidates.size(); ++k) ks.push_back(k);
  for (auto k : ks) out.jaccard.emplace_back(k, jaccard_at_k(out.rednt_order, out.naive_order, k));
  return out;
}

}  // namespace ctbn
