#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctbn/error.hpp"
#include "ctbn/state.hpp"

namespace ctbn {

inline constexpr double kRowSumTolerance = 1e-9;

/// Dense square rate matrix, row-major.
class RateMatrix {
 public:
  RateMatrix() = default;
  explicit RateMatrix(std::size_t side) : side_(side), data_(side * side, 0.0) {}
  RateMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t side() const noexcept { return side_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * side_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * side_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * side_, side_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * side_, side_}; }

  bool operator==(const RateMatrix&) const = default;

 private:
  std::size_t side_ = 0;
  std::vector<double> data_;
};

struct ProcessSpec {
  std::string name;
  int cardinality = 2;
  std::vector<std::string> parents;

  bool operator==(const ProcessSpec&) const = default;
};

/// Conditional intensity matrix: one rate matrix per parent configuration.
/// Configurations are indexed mixed-radix over the parent list in declared
/// order, first-listed parent most significant.
struct Cim {
  std::vector<RateMatrix> matrices;

  std::size_t parent_config_count() const noexcept { return matrices.size(); }
  bool operator==(const Cim&) const = default;
};

using InitialDistribution = std::variant<StateVector, std::vector<double>>;

/// Unvalidated model description, as read from a file or assembled by hand.
struct ModelData {
  std::vector<ProcessSpec> processes;
  std::vector<Cim> cims;
  InitialDistribution initial = StateVector{};

  bool operator==(const ModelData&) const = default;
};

struct Violation {
  enum class Kind {
    bad_cardinality,
    duplicate_name,
    dangling_parent,
    self_parent,
    duplicate_parent,
    dimension_mismatch,
    negative_off_diagonal,
    positive_diagonal,
    row_sum,
    initial_state,
    initial_distribution,
    // warnings
    zero_exit_rate,
    sign_normalized,
  };

  Kind kind;
  std::string process;  // empty when not tied to a process
  std::string detail;
  bool warning = false;
};

std::string to_string(Violation::Kind kind);

/// Every hard constraint violation; empty means the data describes a valid
/// model.
std::vector<Violation> validate_model(const ModelData& data);

/// Soft findings: absorbing local states (exit rate 0).
std::vector<Violation> model_warnings(const ModelData& data);

/// Repairs rows whose signs are transposed (positive diagonal, non-positive
/// off-diagonals, zero row sum) by negating them. Returns one warning per
/// repaired row.
std::vector<Violation> normalize_transposed_rows(ModelData& data);

/// Thrown when constructing a CtbnModel from invalid data.
class InvalidModel : public DomainError {
 public:
  explicit InvalidModel(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Validated, immutable CTBN.
class CtbnModel {
 public:
  /// Throws InvalidModel when validate_model(data) is non-empty.
  explicit CtbnModel(ModelData data);

  const ModelData& data() const noexcept { return data_; }
  std::size_t process_count() const noexcept { return data_.processes.size(); }
  const ProcessSpec& process(ProcessId j) const { return data_.processes[j]; }
  const std::string& name(ProcessId j) const { return data_.processes[j].name; }
  int cardinality(ProcessId j) const { return data_.processes[j].cardinality; }
  const Cim& cim(ProcessId j) const { return data_.cims[j]; }
  std::span<const ProcessId> parents(ProcessId j) const { return parents_[j]; }
  std::span<const ProcessId> children(ProcessId j) const { return children_[j]; }
  std::optional<ProcessId> find(const std::string& name) const;
  /// Throws DomainError for unknown names.
  ProcessId id(const std::string& name) const;

  const StateSpace& state_space() const noexcept { return space_; }
  std::vector<int> cardinalities() const;
  bool binary() const noexcept { return space_.binary(); }
  std::size_t max_parent_count() const noexcept;

  /// Parent configuration of process j in joint state x.
  std::size_t parent_config(ProcessId j, const StateVector& x) const;
  /// Row of j's active intensity matrix at its current local state.
  std::span<const double> local_rate(ProcessId j, const StateVector& x) const;
  /// Current exit rate of j (negated diagonal of the active row).
  double exit_rate(ProcessId j, const StateVector& x) const;

  /// Initial state when the initial distribution is a point mass.
  std::optional<StateVector> initial_state() const;

 private:
  ModelData data_;
  StateSpace space_;
  std::vector<std::vector<ProcessId>> parents_;
  std::vector<std::vector<ProcessId>> children_;
  // per process, stride of each parent in the configuration index
  std::vector<std::vector<std::size_t>> parent_strides_;
};

/// Free-function form of CtbnModel::local_rate.
std::span<const double> local_rate(const CtbnModel& model, ProcessId process, const StateVector& state);

/// Index of `state` in the joint space. Throws DomainError when out of range.
StateIndex state_index(const StateVector& state, const CtbnModel& model);

/// All joint states in index order. Throws CapacityError above `cap`.
std::vector<StateVector> enumerate_states(const CtbnModel& model, StateIndex cap = StateIndex{1} << 20);

/// Rates of a replicator process family.
struct ReplicatorRates {
  double slow_up = 1.0;    // slow process 0 -> 1
  double slow_down = 5.0;  // slow process 1 -> 0
  double fast = 15.0;      // toward the target state
  double base = 0.1;       // away from the target state
};

class DiGraph;  // graph.hpp

/// Binary CTBN where slow processes (and every root) toggle at the slow
/// rates, and every other process moves toward its target at `fast` and away
/// from it at `base`. The target is 1 iff all parents are 1.
CtbnModel build_replicator_ctbn(const DiGraph& graph, const std::vector<std::string>& slow_processes,
                                const ReplicatorRates& rates, StateVector initial = {});

/// The three-process chain A -> B -> C with its published CIMs.
CtbnModel chain3_model();

}  // namespace ctbn
