#pragma once

#include <array>
#include <functional>
#include <random>

#include "ctbn/graph.hpp"
#include "ctbn/model.hpp"

namespace ctbn::testing {

inline std::string models_dir() { return CTBN_MODELS_DIR; }

/// One binary process toggling at rate q in both directions.
inline CtbnModel toggle_model(double q) {
  ModelData d;
  d.processes = {{"X", 2, {}}};
  d.cims = {Cim{{RateMatrix{{-q, q}, {q, -q}}}}};
  d.initial = StateVector{0};
  return CtbnModel(std::move(d));
}

/// n binary processes in a chain whose rates are all zero.
inline CtbnModel frozen_model(std::size_t n) {
  ModelData d;
  for (std::size_t j = 0; j < n; ++j) {
    ProcessSpec p{"P" + std::to_string(j), 2, {}};
    if (j > 0) p.parents = {"P" + std::to_string(j - 1)};
    d.processes.push_back(p);
    Cim cim;
    for (std::size_t c = 0; c < (j > 0 ? 2u : 1u); ++c) cim.matrices.push_back(RateMatrix(2));
    d.cims.push_back(cim);
  }
  d.initial = StateVector(std::vector<LocalState>(n, 0));
  return CtbnModel(std::move(d));
}

/// Random valid model with at most `max_states` joint states: 1 to 4
/// processes of cardinality 2 or 3, random (possibly cyclic) parent sets and
/// rates in [0.2, 4].
inline CtbnModel random_model(std::mt19937_64& rng, std::uint64_t max_states = 16) {
  std::uniform_real_distribution<double> rate(0.2, 4.0);
  std::bernoulli_distribution coin(0.4);
  for (;;) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<int> card(n);
    std::uint64_t states = 1;
    for (auto& c : card) {
      c = std::bernoulli_distribution(0.25)(rng) ? 3 : 2;
      states *= c;
    }
    if (states > max_states) continue;

    ModelData d;
    for (std::size_t j = 0; j < n; ++j) {
      ProcessSpec p{"P" + std::to_string(j), card[j], {}};
      for (std::size_t i = 0; i < n; ++i)
        if (i != j && coin(rng)) p.parents.push_back("P" + std::to_string(i));
      d.processes.push_back(p);
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t configs = 1;
      for (const auto& parent : d.processes[j].parents) configs *= card[std::stoul(parent.substr(1))];
      Cim cim;
      for (std::size_t c = 0; c < configs; ++c) {
        RateMatrix m(card[j]);
        for (int r = 0; r < card[j]; ++r) {
          double sum = 0.0;
          for (int k = 0; k < card[j]; ++k) {
            if (k == r) continue;
            m(r, k) = rate(rng);
            sum += m(r, k);
          }
          m(r, r) = -sum;
        }
        cim.matrices.push_back(m);
      }
      d.cims.push_back(cim);
    }
    d.initial = StateVector(std::vector<LocalState>(n, 0));
    return CtbnModel(std::move(d));
  }
}

/// Random digraph without self-loops.
inline DiGraph random_digraph(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
  DiGraph g(names);
  std::bernoulli_distribution edge(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && edge(rng)) g.add_edge(i, j);
  return g;
}

/// Any simple path from A to B whose nodes all avoid C.
inline bool brute_connected(const UGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  std::vector<bool> on_path(g.node_count(), false);
  std::function<bool(NodeId)> walk = [&](NodeId v) {
    if (b.count(v)) return true;
    on_path[v] = true;
    for (NodeId w : g.neighbors(v))
      if (!on_path[w] && !c.count(w) && walk(w)) return true;
    on_path[v] = false;
    return false;
  };
  for (NodeId s : a)
    if (walk(s)) return true;
  return false;
}

/// Random disjoint A, B, C over n nodes; any of them may come out empty.
inline std::array<NodeSet, 3> random_sets(std::mt19937_64& rng, std::size_t n) {
  std::array<NodeSet, 3> sets;
  std::uniform_int_distribution<int> pick(0, 4);
  for (NodeId v = 0; v < n; ++v) {
    int k = pick(rng);
    if (k < 3) sets[static_cast<std::size_t>(k)].insert(v);
  }
  return sets;
}

}  // namespace ctbn::testing
