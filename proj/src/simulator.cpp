#include "ctbn/simulator.hpp"

#include <algorithm>
#include <stdexcept>

#include "ctbn/parallel.hpp"
#include "ctbn/state_space.hpp"

namespace ctbn {

void SimulationConfig::validate() const {
  if (!std::isfinite(t_end) || !(t_end > 0.0)) throw DomainError("t_end must be finite and positive");
  if (trajectory_count < 1) throw DomainError("trajectory_count must be at least 1");
}

Trajectory sample_trajectory(const CtbnModel& model, const StateVector& initial, double t_end,
                             std::uint64_t seed) {
  model.state_space().check(initial);
  if (!(t_end >= 0.0) || std::isinf(t_end)) throw DomainError("t_end must be finite and non-negative");
  Trajectory out{initial, {}, t_end};
  StateVector state = initial;
  Rng rng(seed);
  forward_sample(model, state, t_end, rng, [&](const Event& e) { out.events.push_back(e); });
  return out;
}

std::vector<Trajectory> sample_ensemble(const CtbnModel& model, const StateVector& initial,
                                        const SimulationConfig& config) {
  config.validate();
  model.state_space().check(initial);
  std::vector<Trajectory> out(config.trajectory_count);
  parallel_for(config.trajectory_count, config.threads, [&](std::size_t k) {
    out[k] = sample_trajectory(model, initial, config.t_end, derive_seed(config.master_seed, k));
  });
  return out;
}

StateVector draw_initial_state(const CtbnModel& model, Rng& rng) {
  if (auto s = model.initial_state()) return *s;
  const auto& dist = std::get<std::vector<double>>(model.data().initial);
  double u = rng.uniform_open();
  StateIndex pick = 0;
  for (StateIndex i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    pick = i;
    if (u < dist[i]) break;
    u -= dist[i];
  }
  return model.state_space().state(pick);
}

Trajectory ensemble_member(const CtbnModel& model, const SimulationConfig& config, std::size_t k) {
  std::uint64_t seed = derive_seed(config.master_seed, k);
  Rng rng(seed);
  StateVector initial = draw_initial_state(model, rng);
  return sample_trajectory(model, initial, config.t_end, mix64(seed));
}

std::vector<Trajectory> sample_ensemble(const CtbnModel& model, const SimulationConfig& config) {
  config.validate();
  std::vector<Trajectory> out(config.trajectory_count);
  parallel_for(config.trajectory_count, config.threads,
               [&](std::size_t k) { out[k] = ensemble_member(model, config, k); });
  return out;
}

StateVector state_at(const Trajectory& trajectory, double t) {
  if (!(t >= 0.0) || t > trajectory.t_end)
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, t_end]");
  StateVector s = trajectory.initial_state;
  for (const auto& e : trajectory.events) {
    if (e.time > t) break;
    s[e.process] = e.new_local_state;
  }
  return s;
}

std::vector<std::string> check_trajectory(const Trajectory& trajectory) {
  std::vector<std::string> problems;
  StateVector s = trajectory.initial_state;
  double last = 0.0;
  for (std::size_t i = 0; i < trajectory.events.size(); ++i) {
    const auto& e = trajectory.events[i];
    const std::string at = "event " + std::to_string(i) + ": ";
    if (!(e.time > last)) problems.push_back(at + "time not strictly increasing");
    if (e.time > trajectory.t_end) problems.push_back(at + "time after t_end");
    if (e.process >= s.size()) {
      problems.push_back(at + "unknown process");
      continue;
    }
    if (s[e.process] == e.new_local_state) problems.push_back(at + "local state unchanged");
    s[e.process] = e.new_local_state;
    last = e.time;
  }
  return problems;
}

}  // namespace ctbn
