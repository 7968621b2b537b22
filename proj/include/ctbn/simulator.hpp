#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ctbn/model.hpp"
#include "ctbn/random.hpp"

namespace ctbn {

struct Event {
  double time = 0.0;
  ProcessId process = 0;
  LocalState new_local_state = 0;

  bool operator==(const Event&) const = default;
};

/// Right-continuous piecewise-constant path: the initial state at t = 0 and
/// single-component transitions at strictly increasing times in (0, t_end].
struct Trajectory {
  StateVector initial_state;
  std::vector<Event> events;
  double t_end = 0.0;

  bool operator==(const Trajectory&) const = default;
};

struct SimulationConfig {
  double t_end = 10.0;
  std::size_t trajectory_count = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;

  /// Throws DomainError unless t_end is finite and positive and at least one
  /// trajectory is requested.
  void validate() const;
};

/// Forward sampling by competing exponential clocks. Every process holds a
/// pending firing time drawn from its current exit rate; the earliest fires,
/// its next local state is drawn from the jump distribution of its active
/// row, and clocks are redrawn for the fired process and its children. Ties
/// fire the lowest process index. `on_event` is called for every event with
/// time <= t_end, after `state` has been updated.
template <class OnEvent>
void forward_sample(const CtbnModel& model, StateVector& state, double t_end, Rng& rng, OnEvent&& on_event) {
  const std::size_t n = model.process_count();
  if (!(t_end > 0.0) || n == 0) return;
  std::vector<double> pending(n);
  double now = 0.0;
  auto redraw = [&](ProcessId j) {
    double at = now + rng.exponential(model.exit_rate(j, state));
    pending[j] = at > now ? at : std::nextafter(now, std::numeric_limits<double>::infinity());
  };
  for (ProcessId j = 0; j < n; ++j) redraw(j);

  for (;;) {
    ProcessId fired = 0;
    for (ProcessId j = 1; j < n; ++j)
      if (pending[j] < pending[fired]) fired = j;
    if (!(pending[fired] <= t_end)) return;
    now = pending[fired];

    auto row = model.local_rate(fired, state);
    const auto here = static_cast<std::size_t>(state[fired]);
    std::size_t next = here;
    if (row.size() == 2) {
      next = 1 - here;
    } else {
      double u = rng.uniform_open() * -row[here];
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k == here || row[k] <= 0.0) continue;
        next = k;
        if (u < row[k]) break;
        u -= row[k];
      }
    }
    state[fired] = static_cast<LocalState>(next);
    on_event(Event{now, fired, state[fired]});

    redraw(fired);
    for (ProcessId c : model.children(fired)) redraw(c);
  }
}

/// Deterministic in (model, initial, t_end, seed). t_end = 0 yields no events.
Trajectory sample_trajectory(const CtbnModel& model, const StateVector& initial, double t_end,
                             std::uint64_t seed);

/// Trajectory k uses derive_seed(config.master_seed, k); the result does not
/// depend on config.threads.
std::vector<Trajectory> sample_ensemble(const CtbnModel& model, const StateVector& initial,
                                        const SimulationConfig& config);

/// Draws a joint state from the model's initial distribution (point masses
/// need no randomness).
StateVector draw_initial_state(const CtbnModel& model, Rng& rng);

/// Like sample_ensemble, but every trajectory starts from its own draw of the
/// model's initial distribution.
std::vector<Trajectory> sample_ensemble(const CtbnModel& model, const SimulationConfig& config);

/// Trajectory k of sample_ensemble(model, config), computed on its own so
/// large ensembles can be streamed.
Trajectory ensemble_member(const CtbnModel& model, const SimulationConfig& config, std::size_t k);

/// State after the last event with time <= t. Throws std::out_of_range
/// outside [0, t_end].
StateVector state_at(const Trajectory& trajectory, double t);

/// Structural problems: non-increasing times, times outside (0, t_end],
/// events that do not change the local state, out-of-range processes.
std::vector<std::string> check_trajectory(const Trajectory& trajectory);

}  // namespace ctbn
