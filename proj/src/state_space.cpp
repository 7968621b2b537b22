#include "ctbn/state_space.hpp"

#include <limits>
#include <numeric>
#include <sstream>

namespace ctbn {

int active_alarm_count(const StateVector& s) { return std::accumulate(s.values.begin(), s.values.end(), 0); }

std::string state_bits(const StateVector& s) {
  bool wide = false;
  for (auto v : s.values) wide = wide || v > 9 || v < 0;
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (wide && i > 0) out += '.';
    out += std::to_string(s[i]);
  }
  return out;
}

StateVector parse_state_bits(const std::string& text) {
  StateVector s;
  auto fail = [&] { return ParseError("malformed state '" + text + "'"); };
  if (text.empty()) throw fail();
  if (text.find_first_of(".,") != std::string::npos) {
    std::string token;
    std::istringstream is(text);
    char sep = text.find('.') != std::string::npos ? '.' : ',';
    while (std::getline(is, token, sep)) {
      if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) throw fail();
      s.values.push_back(std::stoi(token));
    }
    return s;
  }
  for (char c : text) {
    if (c < '0' || c > '9') throw fail();
    s.values.push_back(c - '0');
  }
  return s;
}

StateSpace::StateSpace(std::vector<int> cardinalities) : cardinalities_(std::move(cardinalities)) {
  const std::size_t n = cardinalities_.size();
  strides_.assign(n, 0);
  constexpr StateIndex limit = StateIndex{1} << 63;
  StateIndex stride = 1;
  for (std::size_t j = n; j-- > 0;) {
    strides_[j] = stride;
    auto card = static_cast<StateIndex>(std::max(cardinalities_[j], 1));
    if (stride > limit / card) {
      indexable_ = false;
      break;
    }
    stride *= card;
  }
  size_ = indexable_ ? stride : 0;
}

StateIndex StateSpace::size() const {
  if (!indexable_) throw CapacityError("joint state space does not fit a 63-bit index");
  return size_;
}

bool StateSpace::binary() const noexcept {
  for (int c : cardinalities_)
    if (c != 2) return false;
  return true;
}

void StateSpace::check(const StateVector& s) const {
  if (s.size() != cardinalities_.size())
    throw DomainError("state has " + std::to_string(s.size()) + " entries, model has " +
                      std::to_string(cardinalities_.size()) + " processes");
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] < 0 || s[j] >= cardinalities_[j])
      throw DomainError("local state " + std::to_string(s[j]) + " of process " + std::to_string(j) +
                        " is out of range");
}

StateIndex StateSpace::index(const StateVector& s) const {
  check(s);
  if (!indexable_) throw CapacityError("joint state space does not fit a 63-bit index");
  StateIndex x = 0;
  for (std::size_t j = 0; j < s.size(); ++j) x += static_cast<StateIndex>(s[j]) * strides_[j];
  return x;
}

StateVector StateSpace::state(StateIndex index) const {
  if (index >= size()) throw DomainError("state index " + std::to_string(index) + " out of range");
  StateVector s(std::vector<LocalState>(cardinalities_.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    s[j] = static_cast<LocalState>(index / strides_[j]);
    index %= strides_[j];
  }
  return s;
}

IntensityMatrix amalgamate(const CtbnModel& model, StateIndex cap) {
  const auto& space = model.state_space();
  const StateIndex n = space.size();
  if (n > cap) throw CapacityError("cannot amalgamate " + std::to_string(n) + " joint states (cap " +
                                   std::to_string(cap) + ")");

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  std::size_t degree = 0;
  for (int c : space.cardinalities()) degree += static_cast<std::size_t>(c - 1);
  entries.reserve(static_cast<std::size_t>(n) * (degree + 1));

  for (StateIndex x = 0; x < n; ++x) {
    StateVector s = space.state(x);
    double exit = 0.0;
    for (std::size_t j = 0; j < model.process_count(); ++j) {
      auto row = model.local_rate(j, s);
      const auto here = static_cast<std::size_t>(s[j]);
      for (std::size_t to = 0; to < row.size(); ++to) {
        if (to == here || row[to] == 0.0) continue;
        StateIndex y = x - here * space.stride(j) + to * space.stride(j);
        entries.emplace_back(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y), row[to]);
        exit += row[to];
      }
    }
    entries.emplace_back(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x), -exit);
  }
  IntensityMatrix::Storage q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  q.setFromTriplets(entries.begin(), entries.end());
  return IntensityMatrix(std::move(q));
}

std::size_t StateSpaceGraph::degree() const noexcept {
  std::size_t d = 0;
  for (int c : space_.cardinalities()) d += static_cast<std::size_t>(c - 1);
  return d;
}

std::vector<StateIndex> StateSpaceGraph::neighbors(StateIndex x) const {
  StateVector s = space_.state(x);
  std::vector<StateIndex> out;
  out.reserve(degree());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const StateIndex base = x - static_cast<StateIndex>(s[j]) * space_.stride(j);
    for (int v = 0; v < space_.cardinality(j); ++v)
      if (v != s[j]) out.push_back(base + static_cast<StateIndex>(v) * space_.stride(j));
  }
  return out;
}

bool StateSpaceGraph::adjacent(StateIndex x, StateIndex y) const {
  StateVector a = space_.state(x), b = space_.state(y);
  int differing = 0;
  for (std::size_t j = 0; j < a.size(); ++j) differing += a[j] != b[j];
  return differing == 1;
}

std::vector<std::pair<StateIndex, StateIndex>> StateSpaceGraph::edges() const {
  std::vector<std::pair<StateIndex, StateIndex>> out;
  for (StateIndex x = 0; x < node_count(); ++x)
    for (StateIndex y : neighbors(x))
      if (x < y) out.emplace_back(x, y);
  return out;
}

StateSpaceGraph build_state_space_graph(const CtbnModel& model, StateIndex cap) {
  StateIndex n = model.state_space().size();
  if (n > cap) throw CapacityError("state-space graph of " + std::to_string(n) + " nodes exceeds cap");
  return StateSpaceGraph(model.state_space());
}

}  // namespace ctbn
