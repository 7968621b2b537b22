#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <utility>
#include <vector>

#include "ctbn/model.hpp"

namespace ctbn {

inline constexpr StateIndex kDefaultStateCap = StateIndex{1} << 20;

/// Flat CTMP rate matrix over the joint state space. Stored sparse: a CTBN
/// state has only sum_j (card_j - 1) possible successors.
class IntensityMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  explicit IntensityMatrix(Storage rates) : rates_(std::move(rates)) {}

  StateIndex side() const noexcept { return static_cast<StateIndex>(rates_.rows()); }
  double rate(StateIndex from, StateIndex to) const {
    return rates_.coeff(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }
  /// q_x, the negated diagonal.
  double exit_rate(StateIndex x) const { return -rate(x, x); }
  const Storage& sparse() const noexcept { return rates_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(rates_); }

 private:
  Storage rates_;
};

/// Joint-space rate matrix. Throws CapacityError above `cap` states.
IntensityMatrix amalgamate(const CtbnModel& model, StateIndex cap = kDefaultStateCap);

/// Undirected graph on joint states; x and y are adjacent iff they differ in
/// exactly one process. Neighborhoods are generated on demand from the radix,
/// so the graph itself costs no memory.
class StateSpaceGraph {
 public:
  explicit StateSpaceGraph(StateSpace space) : space_(std::move(space)) {}

  const StateSpace& space() const noexcept { return space_; }
  StateIndex node_count() const { return space_.size(); }
  /// sum_j (cardinality_j - 1), the same for every node.
  std::size_t degree() const noexcept;
  std::vector<StateIndex> neighbors(StateIndex x) const;
  bool adjacent(StateIndex x, StateIndex y) const;
  /// Every edge once, as (smaller, larger).
  std::vector<std::pair<StateIndex, StateIndex>> edges() const;

 private:
  StateSpace space_;
};

/// Throws CapacityError above `cap` states.
StateSpaceGraph build_state_space_graph(const CtbnModel& model, StateIndex cap = kDefaultStateCap);

}  // namespace ctbn
