#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ctbn {

using LocalState = std::int32_t;
using StateIndex = std::uint64_t;
using ProcessId = std::size_t;

/// One local state per process, in model process order.
struct StateVector {
  std::vector<LocalState> values;

  StateVector() = default;
  explicit StateVector(std::vector<LocalState> v) : values(std::move(v)) {}
  StateVector(std::initializer_list<LocalState> v) : values(v) {}

  std::size_t size() const noexcept { return values.size(); }
  LocalState operator[](std::size_t i) const { return values[i]; }
  LocalState& operator[](std::size_t i) { return values[i]; }

  auto operator<=>(const StateVector&) const = default;
};

/// s-bar: the number of active alarms, i.e. the sum of local states.
int active_alarm_count(const StateVector& s);

/// Local states rendered in process order ("100" for A=1,B=0,C=0). Uses '.'
/// separators when any value has more than one digit.
std::string state_bits(const StateVector& s);

/// Inverse of state_bits. Throws ParseError on malformed input.
StateVector parse_state_bits(const std::string& text);

/// Mixed-radix indexing of the joint state space, first process most
/// significant.
class StateSpace {
 public:
  explicit StateSpace(std::vector<int> cardinalities);

  std::size_t process_count() const noexcept { return cardinalities_.size(); }
  std::span<const int> cardinalities() const noexcept { return cardinalities_; }
  int cardinality(ProcessId j) const { return cardinalities_[j]; }
  /// Joint state count. Throws CapacityError when it does not fit in 63 bits.
  StateIndex size() const;
  bool indexable() const noexcept { return indexable_; }
  bool binary() const noexcept;

  /// Throws DomainError for wrong length or out-of-range local states.
  StateIndex index(const StateVector& s) const;
  StateVector state(StateIndex index) const;
  void check(const StateVector& s) const;
  StateIndex stride(ProcessId j) const { return strides_[j]; }

 private:
  std::vector<int> cardinalities_;
  std::vector<StateIndex> strides_;
  StateIndex size_ = 0;
  bool indexable_ = true;
};

}  // namespace ctbn
