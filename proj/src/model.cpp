#include "ctbn/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "ctbn/graph.hpp"

namespace ctbn {

RateMatrix::RateMatrix(std::initializer_list<std::initializer_list<double>> rows) : side_(rows.size()) {
  data_.reserve(side_ * side_);
  for (const auto& r : rows) {
    if (r.size() != side_) throw DomainError("RateMatrix: rows must form a square matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::bad_cardinality: return "bad_cardinality";
    case Violation::Kind::duplicate_name: return "duplicate_name";
    case Violation::Kind::dangling_parent: return "dangling_parent";
    case Violation::Kind::self_parent: return "self_parent";
    case Violation::Kind::duplicate_parent: return "duplicate_parent";
    case Violation::Kind::dimension_mismatch: return "dimension_mismatch";
    case Violation::Kind::negative_off_diagonal: return "negative_off_diagonal";
    case Violation::Kind::positive_diagonal: return "positive_diagonal";
    case Violation::Kind::row_sum: return "row_sum";
    case Violation::Kind::initial_state: return "initial_state";
    case Violation::Kind::initial_distribution: return "initial_distribution";
    case Violation::Kind::zero_exit_rate: return "zero_exit_rate";
    case Violation::Kind::sign_normalized: return "sign_normalized";
  }
  return "unknown";
}

namespace {

std::string where(std::size_t config, std::size_t row) {
  std::ostringstream os;
  os << "parent configuration " << config << ", row " << row;
  return os.str();
}

// Resolved parent indices, or nullopt when some parent does not resolve.
std::optional<std::vector<std::size_t>> resolve_parents(const ModelData& data, const ProcessSpec& p) {
  std::vector<std::size_t> ids;
  for (const auto& parent : p.parents) {
    auto it = std::find_if(data.processes.begin(), data.processes.end(),
                           [&](const ProcessSpec& q) { return q.name == parent; });
    if (it == data.processes.end() || parent == p.name) return std::nullopt;
    ids.push_back(static_cast<std::size_t>(it - data.processes.begin()));
  }
  return ids;
}

void check_matrix(const RateMatrix& m, const std::string& process, std::size_t config,
                  std::vector<Violation>& out) {
  for (std::size_t r = 0; r < m.side(); ++r) {
    double sum = 0.0;
    bool finite = true;
    for (std::size_t c = 0; c < m.side(); ++c) {
      double v = m(r, c);
      if (!std::isfinite(v)) finite = false;
      sum += v;
      if (c != r && v < 0.0)
        out.push_back({Violation::Kind::negative_off_diagonal, process,
                       where(config, r) + ", column " + std::to_string(c), false});
    }
    if (m(r, r) > 0.0) out.push_back({Violation::Kind::positive_diagonal, process, where(config, r), false});
    if (!finite || std::abs(sum) > kRowSumTolerance) {
      std::ostringstream os;
      os << where(config, r) << " sums to " << sum;
      out.push_back({Violation::Kind::row_sum, process, os.str(), false});
    }
  }
}

}  // namespace

std::vector<Violation> validate_model(const ModelData& data) {
  std::vector<Violation> out;
  const auto& procs = data.processes;

  std::map<std::string, int> seen;
  for (const auto& p : procs) {
    if (p.cardinality < 2)
      out.push_back({Violation::Kind::bad_cardinality, p.name,
                     "cardinality " + std::to_string(p.cardinality) + " < 2", false});
    if (++seen[p.name] == 2) out.push_back({Violation::Kind::duplicate_name, p.name, "", false});
  }

  for (const auto& p : procs) {
    std::map<std::string, int> listed;
    for (const auto& parent : p.parents) {
      if (parent == p.name) {
        out.push_back({Violation::Kind::self_parent, p.name, "", false});
      } else if (!seen.count(parent)) {
        out.push_back({Violation::Kind::dangling_parent, p.name, "unknown parent '" + parent + "'", false});
      }
      if (++listed[parent] == 2)
        out.push_back({Violation::Kind::duplicate_parent, p.name, "parent '" + parent + "' listed twice", false});
    }
  }

  if (data.cims.size() != procs.size()) {
    out.push_back({Violation::Kind::dimension_mismatch, "",
                   std::to_string(data.cims.size()) + " CIMs for " + std::to_string(procs.size()) + " processes",
                   false});
  } else {
    for (std::size_t j = 0; j < procs.size(); ++j) {
      const auto& p = procs[j];
      auto parent_ids = resolve_parents(data, p);
      if (!parent_ids || p.cardinality < 2) continue;
      std::size_t configs = 1;
      bool dims_known = true;
      for (auto id : *parent_ids) {
        if (procs[id].cardinality < 2) dims_known = false;
        configs *= static_cast<std::size_t>(std::max(procs[id].cardinality, 1));
      }
      if (!dims_known) continue;
      const auto& cim = data.cims[j];
      if (cim.matrices.size() != configs) {
        out.push_back({Violation::Kind::dimension_mismatch, p.name,
                       std::to_string(cim.matrices.size()) + " matrices, expected " + std::to_string(configs),
                       false});
        continue;
      }
      for (std::size_t c = 0; c < configs; ++c) {
        const auto& m = cim.matrices[c];
        if (m.side() != static_cast<std::size_t>(p.cardinality)) {
          out.push_back({Violation::Kind::dimension_mismatch, p.name,
                         "matrix " + std::to_string(c) + " has side " + std::to_string(m.side()) + ", expected " +
                             std::to_string(p.cardinality),
                         false});
          continue;
        }
        check_matrix(m, p.name, c, out);
      }
    }
  }

  if (const auto* s = std::get_if<StateVector>(&data.initial)) {
    if (s->size() != procs.size()) {
      out.push_back({Violation::Kind::initial_state, "",
                     "initial state has " + std::to_string(s->size()) + " entries for " +
                         std::to_string(procs.size()) + " processes",
                     false});
    } else {
      for (std::size_t j = 0; j < procs.size(); ++j)
        if ((*s)[j] < 0 || (*s)[j] >= procs[j].cardinality)
          out.push_back({Violation::Kind::initial_state, procs[j].name,
                         "local state " + std::to_string((*s)[j]) + " out of range", false});
    }
  } else {
    const auto& dist = std::get<std::vector<double>>(data.initial);
    long double expected = 1;
    for (const auto& p : procs) expected *= std::max(p.cardinality, 1);
    if (static_cast<long double>(dist.size()) != expected) {
      out.push_back({Violation::Kind::initial_distribution, "",
                     std::to_string(dist.size()) + " probabilities for the joint state space", false});
    } else {
      double total = 0.0;
      bool negative = false;
      for (double v : dist) {
        if (!(v >= 0.0)) negative = true;
        total += v;
      }
      if (negative) out.push_back({Violation::Kind::initial_distribution, "", "negative probability", false});
      if (std::abs(total - 1.0) > kRowSumTolerance)
        out.push_back({Violation::Kind::initial_distribution, "",
                       "probabilities sum to " + std::to_string(total), false});
    }
  }
  return out;
}

std::vector<Violation> model_warnings(const ModelData& data) {
  std::vector<Violation> out;
  for (std::size_t j = 0; j < data.processes.size() && j < data.cims.size(); ++j) {
    const auto& cim = data.cims[j];
    for (std::size_t c = 0; c < cim.matrices.size(); ++c) {
      const auto& m = cim.matrices[c];
      for (std::size_t r = 0; r < m.side(); ++r)
        if (m(r, r) == 0.0)
          out.push_back({Violation::Kind::zero_exit_rate, data.processes[j].name, where(c, r) + " is absorbing",
                         true});
    }
  }
  return out;
}

std::vector<Violation> normalize_transposed_rows(ModelData& data) {
  std::vector<Violation> out;
  for (std::size_t j = 0; j < data.processes.size() && j < data.cims.size(); ++j) {
    auto& cim = data.cims[j];
    for (std::size_t c = 0; c < cim.matrices.size(); ++c) {
      auto& m = cim.matrices[c];
      for (std::size_t r = 0; r < m.side(); ++r) {
        auto row = m.row(r);
        double sum = std::accumulate(row.begin(), row.end(), 0.0);
        bool transposed = row[r] > 0.0 && std::abs(sum) <= kRowSumTolerance;
        for (std::size_t k = 0; k < row.size(); ++k)
          if (k != r && row[k] > 0.0) transposed = false;
        if (!transposed) continue;
        for (auto& v : row) v = v == 0.0 ? 0.0 : -v;
        out.push_back({Violation::Kind::sign_normalized, data.processes[j].name,
                       where(c, r) + " had transposed signs and was negated", true});
      }
    }
  }
  return out;
}

namespace {
std::string summarize(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "invalid model (" << v.size() << " violation" << (v.size() == 1 ? "" : "s") << ")";
  if (!v.empty()) {
    os << ": " << to_string(v.front().kind);
    if (!v.front().process.empty()) os << " [" << v.front().process << "]";
    if (!v.front().detail.empty()) os << " " << v.front().detail;
  }
  return os.str();
}

std::vector<int> cardinalities_of(const ModelData& data) {
  std::vector<int> card;
  for (const auto& p : data.processes) card.push_back(p.cardinality);
  return card;
}

const ModelData& checked(const ModelData& data) {
  auto violations = validate_model(data);
  if (!violations.empty()) throw InvalidModel(std::move(violations));
  return data;
}
}  // namespace

InvalidModel::InvalidModel(std::vector<Violation> violations)
    : DomainError(summarize(violations)), violations_(std::move(violations)) {}

CtbnModel::CtbnModel(ModelData data)
    : data_(checked(data)), space_(cardinalities_of(data_)) {
  const std::size_t n = data_.processes.size();
  parents_.resize(n);
  children_.resize(n);
  parent_strides_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    parents_[j] = *resolve_parents(data_, data_.processes[j]);
    std::vector<std::size_t> strides(parents_[j].size());
    std::size_t stride = 1;
    for (std::size_t k = parents_[j].size(); k-- > 0;) {
      strides[k] = stride;
      stride *= static_cast<std::size_t>(data_.processes[parents_[j][k]].cardinality);
    }
    parent_strides_[j] = std::move(strides);
    for (auto p : parents_[j]) children_[p].push_back(j);
  }
  for (auto& c : children_) std::sort(c.begin(), c.end());
}

std::optional<ProcessId> CtbnModel::find(const std::string& name) const {
  for (std::size_t j = 0; j < data_.processes.size(); ++j)
    if (data_.processes[j].name == name) return j;
  return std::nullopt;
}

ProcessId CtbnModel::id(const std::string& name) const {
  auto j = find(name);
  if (!j) throw DomainError("unknown process '" + name + "'");
  return *j;
}

std::vector<int> CtbnModel::cardinalities() const { return cardinalities_of(data_); }

std::size_t CtbnModel::max_parent_count() const noexcept {
  std::size_t m = 0;
  for (const auto& p : parents_) m = std::max(m, p.size());
  return m;
}

std::size_t CtbnModel::parent_config(ProcessId j, const StateVector& x) const {
  std::size_t config = 0;
  const auto& ps = parents_[j];
  const auto& strides = parent_strides_[j];
  for (std::size_t k = 0; k < ps.size(); ++k) config += static_cast<std::size_t>(x[ps[k]]) * strides[k];
  return config;
}

std::span<const double> CtbnModel::local_rate(ProcessId j, const StateVector& x) const {
  return data_.cims[j].matrices[parent_config(j, x)].row(static_cast<std::size_t>(x[j]));
}

double CtbnModel::exit_rate(ProcessId j, const StateVector& x) const {
  return -local_rate(j, x)[static_cast<std::size_t>(x[j])];
}

std::optional<StateVector> CtbnModel::initial_state() const {
  if (const auto* s = std::get_if<StateVector>(&data_.initial)) return *s;
  return std::nullopt;
}

std::span<const double> local_rate(const CtbnModel& model, ProcessId process, const StateVector& state) {
  model.state_space().check(state);
  return model.local_rate(process, state);
}

StateIndex state_index(const StateVector& state, const CtbnModel& model) {
  return model.state_space().index(state);
}

std::vector<StateVector> enumerate_states(const CtbnModel& model, StateIndex cap) {
  const auto& space = model.state_space();
  StateIndex n = space.size();
  if (n > cap) throw CapacityError("joint state space of " + std::to_string(n) + " states exceeds cap");
  std::vector<StateVector> out;
  out.reserve(n);
  StateVector s(std::vector<LocalState>(space.process_count(), 0));
  for (StateIndex i = 0; i < n; ++i) {
    out.push_back(s);
    // increment, last process fastest
    for (std::size_t j = space.process_count(); j-- > 0;) {
      if (++s[j] < space.cardinality(j)) break;
      s[j] = 0;
    }
  }
  return out;
}

CtbnModel build_replicator_ctbn(const DiGraph& graph, const std::vector<std::string>& slow_processes,
                                const ReplicatorRates& rates, StateVector initial) {
  if (!(rates.slow_up > 0 && rates.slow_down > 0 && rates.fast > 0 && rates.base >= 0))
    throw DomainError("replicator rates must be positive");
  if (!(rates.slow_up < rates.fast && rates.slow_down < rates.fast))
    throw DomainError("slow rates must be below the fast rate");
  if (!(rates.base < rates.fast)) throw DomainError("base rate must be below the fast rate");

  NodeSet slow = graph.ids(slow_processes);
  ModelData data;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    ProcessSpec spec{graph.name(v), 2, {}};
    for (NodeId p : graph.parents(v)) spec.parents.push_back(graph.name(p));
    const std::size_t configs = std::size_t{1} << spec.parents.size();

    Cim cim;
    for (std::size_t c = 0; c < configs; ++c) {
      if (slow.count(v) || spec.parents.empty()) {
        cim.matrices.push_back({{-rates.slow_up, rates.slow_up}, {rates.slow_down, -rates.slow_down}});
      } else if (c == configs - 1) {  // every parent on: move to 1
        cim.matrices.push_back({{-rates.fast, rates.fast}, {rates.base, -rates.base}});
      } else {
        cim.matrices.push_back({{-rates.base, rates.base}, {rates.fast, -rates.fast}});
      }
    }
    data.processes.push_back(std::move(spec));
    data.cims.push_back(std::move(cim));
  }
  if (initial.size() == 0) initial = StateVector(std::vector<LocalState>(graph.node_count(), 0));
  data.initial = std::move(initial);
  return CtbnModel(std::move(data));
}

CtbnModel chain3_model() {
  ModelData data;
  data.processes = {{"A", 2, {}}, {"B", 2, {"A"}}, {"C", 2, {"B"}}};
  data.cims = {
      Cim{{RateMatrix{{-1.0, 1.0}, {5.0, -5.0}}}},
      Cim{{RateMatrix{{-0.1, 0.1}, {15.0, -15.0}}, RateMatrix{{-15.0, 15.0}, {0.1, -0.1}}}},
      Cim{{RateMatrix{{-0.1, 0.1}, {15.0, -15.0}}, RateMatrix{{-15.0, 15.0}, {0.1, -0.1}}}},
  };
  data.initial = StateVector{0, 0, 0};
  return CtbnModel(std::move(data));
}

}  // namespace ctbn
