#include "ctbn/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "ctbn/model.hpp"

namespace ctbn {

DiGraph::DiGraph(std::vector<std::string> names) {
  for (auto& n : names) add_node(std::move(n));
}

DiGraph DiGraph::from_edges(std::vector<std::string> nodes,
                            const std::vector<std::pair<std::string, std::string>>& edges) {
  DiGraph g(std::move(nodes));
  for (const auto& [a, b] : edges) {
    if (!g.find(a)) g.add_node(a);
    if (!g.find(b)) g.add_node(b);
    g.add_edge(a, b);
  }
  return g;
}

NodeId DiGraph::add_node(std::string name) {
  if (find(name)) throw DomainError("duplicate node '" + name + "'");
  names_.push_back(std::move(name));
  out_.emplace_back();
  in_.emplace_back();
  return names_.size() - 1;
}

bool DiGraph::add_edge(NodeId from, NodeId to) {
  if (from >= node_count() || to >= node_count()) throw DomainError("edge endpoint does not exist");
  if (from == to) throw DomainError("self-loop on '" + names_[from] + "'");
  if (!out_[from].insert(to).second) return false;
  in_[to].insert(from);
  return true;
}

bool DiGraph::add_edge(const std::string& from, const std::string& to) { return add_edge(id(from), id(to)); }

std::size_t DiGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& o : out_) n += o.size();
  return n;
}

std::optional<NodeId> DiGraph::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeId>(it - names_.begin());
}

NodeId DiGraph::id(const std::string& name) const {
  auto v = find(name);
  if (!v) throw DomainError("unknown node '" + name + "'");
  return *v;
}

NodeSet DiGraph::ids(const std::vector<std::string>& names) const {
  NodeSet out;
  for (const auto& n : names) out.insert(id(n));
  return out;
}

std::vector<std::string> DiGraph::names_of(const NodeSet& nodes) const {
  std::vector<std::string> out;
  for (auto v : nodes) out.push_back(name(v));
  return out;
}

std::vector<Edge> DiGraph::edges() const {
  std::vector<Edge> out;
  for (NodeId v = 0; v < node_count(); ++v)
    for (NodeId w : out_[v]) out.emplace_back(v, w);
  return out;
}

NodeSet DiGraph::all_nodes() const {
  NodeSet out;
  for (NodeId v = 0; v < node_count(); ++v) out.insert(v);
  return out;
}

UGraph::UGraph(std::vector<std::string> names) : names_(std::move(names)), adj_(names_.size()) {}

bool UGraph::add_edge(NodeId a, NodeId b) {
  if (a >= node_count() || b >= node_count()) throw DomainError("edge endpoint does not exist");
  if (a == b) throw DomainError("self-loop in undirected graph");
  if (!adj_[a].insert(b).second) return false;
  adj_[b].insert(a);
  return true;
}

std::vector<Edge> UGraph::edges() const {
  std::vector<Edge> out;
  for (NodeId v = 0; v < node_count(); ++v)
    for (NodeId w : adj_[v])
      if (v < w) out.emplace_back(v, w);
  return out;
}

DiGraph ctbn_graph(const CtbnModel& model) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < model.process_count(); ++j) names.push_back(model.name(j));
  DiGraph g(std::move(names));
  for (std::size_t j = 0; j < model.process_count(); ++j)
    for (auto p : model.parents(j)) g.add_edge(p, j);
  return g;
}

namespace {
void require_nodes(const DiGraph& g, const NodeSet& a) {
  for (auto v : a)
    if (v >= g.node_count()) throw DomainError("unknown node id " + std::to_string(v));
}
void require_nodes(const UGraph& g, const NodeSet& a) {
  for (auto v : a)
    if (v >= g.node_count()) throw DomainError("unknown node id " + std::to_string(v));
}
}  // namespace

NodeSet parents(const DiGraph& g, const NodeSet& a) {
  require_nodes(g, a);
  NodeSet out;
  for (auto v : a)
    for (auto p : g.parents(v))
      if (!a.count(p)) out.insert(p);
  return out;
}

NodeSet closure(const DiGraph& g, const NodeSet& a) {
  NodeSet out = parents(g, a);
  out.insert(a.begin(), a.end());
  return out;
}

NodeSet ancestors(const DiGraph& g, const NodeSet& a) {
  require_nodes(g, a);
  NodeSet out = a;
  std::deque<NodeId> queue(a.begin(), a.end());
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (auto p : g.parents(v))
      if (out.insert(p).second) queue.push_back(p);
  }
  return out;
}

bool is_ancestral(const DiGraph& g, const NodeSet& a) { return ancestors(g, a) == a; }

DiGraph induced_subgraph(const DiGraph& g, const NodeSet& a) {
  require_nodes(g, a);
  DiGraph sub;
  std::map<NodeId, NodeId> renumber;
  for (auto v : a) renumber[v] = sub.add_node(g.name(v));
  for (auto v : a)
    for (auto w : g.children(v))
      if (a.count(w)) sub.add_edge(renumber[v], renumber[w]);
  return sub;
}

UGraph moralize(const DiGraph& g) {
  UGraph ug(g.names());
  for (const auto& [a, b] : g.edges()) ug.add_edge(a, b);
  for (NodeId child = 0; child < g.node_count(); ++child) {
    const auto& ps = g.parents(child);
    for (auto i = ps.begin(); i != ps.end(); ++i)
      for (auto j = std::next(i); j != ps.end(); ++j) ug.add_edge(*i, *j);
  }
  return ug;
}

std::vector<Edge> moral_edges_added(const DiGraph& g) {
  std::set<Edge> added;
  for (NodeId child = 0; child < g.node_count(); ++child) {
    const auto& ps = g.parents(child);
    for (auto i = ps.begin(); i != ps.end(); ++i)
      for (auto j = std::next(i); j != ps.end(); ++j)
        if (!g.has_edge(*i, *j) && !g.has_edge(*j, *i)) added.emplace(*i, *j);
  }
  return {added.begin(), added.end()};
}

namespace {
void require_disjoint(const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  auto overlap = [](const NodeSet& x, const NodeSet& y) {
    return std::any_of(x.begin(), x.end(), [&](NodeId v) { return y.count(v) > 0; });
  };
  if (overlap(a, b) || overlap(a, c) || overlap(b, c)) throw DomainError("node sets must be disjoint");
}
}  // namespace

bool separated(const UGraph& ug, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  require_nodes(ug, a);
  require_nodes(ug, b);
  require_nodes(ug, c);
  require_disjoint(a, b, c);
  if (a.empty() || b.empty()) return true;
  std::vector<char> seen(ug.node_count(), 0);
  std::deque<NodeId> queue;
  for (auto v : a) {
    seen[v] = 1;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (auto w : ug.neighbors(v)) {
      if (seen[w] || c.count(w)) continue;
      if (b.count(w)) return false;
      seen[w] = 1;
      queue.push_back(w);
    }
  }
  return true;
}

IndependenceCertificate ctbn_independent(const DiGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  require_nodes(g, a);
  require_nodes(g, b);
  require_nodes(g, c);
  require_disjoint(a, b, c);

  IndependenceCertificate cert{a, b, c, false, {}, {}};
  NodeSet all = a;
  all.insert(b.begin(), b.end());
  all.insert(c.begin(), c.end());
  cert.ancestral_set = ancestors(g, all);

  DiGraph sub = induced_subgraph(g, cert.ancestral_set);
  std::vector<NodeId> original(cert.ancestral_set.begin(), cert.ancestral_set.end());
  auto to_sub = [&](const NodeSet& s) {
    NodeSet out;
    for (auto v : s)
      out.insert(static_cast<NodeId>(std::lower_bound(original.begin(), original.end(), v) - original.begin()));
    return out;
  };
  for (const auto& [u, v] : moral_edges_added(sub)) cert.moral_edges_added.emplace_back(original[u], original[v]);
  cert.separated = separated(moralize(sub), to_sub(a), to_sub(b), to_sub(c));
  return cert;
}

NodeSet GraphPartition::unroll(const NodeSet& block_ids) const {
  NodeSet out;
  for (auto b : block_ids) {
    if (b >= blocks.size()) throw DomainError("unknown block " + std::to_string(b));
    out.insert(blocks[b].begin(), blocks[b].end());
  }
  return out;
}

GraphPartition graph_partition(const DiGraph& g, const std::vector<NodeSet>& blocks,
                               std::vector<std::string> block_names) {
  GraphPartition p;
  p.blocks = blocks;
  constexpr auto unassigned = static_cast<std::size_t>(-1);
  p.block_of.assign(g.node_count(), unassigned);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].empty()) throw DomainError("empty block in partition");
    for (auto v : blocks[k]) {
      if (v >= g.node_count()) throw DomainError("block contains unknown node");
      if (p.block_of[v] != unassigned) throw DomainError("blocks overlap at '" + g.name(v) + "'");
      p.block_of[v] = k;
    }
  }
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (p.block_of[v] == unassigned) throw DomainError("node '" + g.name(v) + "' is in no block");

  if (block_names.empty()) {
    for (const auto& b : blocks) {
      std::string label = "{";
      for (auto v : b) label += (label.size() > 1 ? "," : "") + g.name(v);
      block_names.push_back(label + "}");
    }
  }
  if (block_names.size() != blocks.size()) throw DomainError("one name per block required");
  p.graph = DiGraph(std::move(block_names));
  for (const auto& [u, v] : g.edges())
    if (p.block_of[u] != p.block_of[v]) p.graph.add_edge(p.block_of[u], p.block_of[v]);
  return p;
}

PartitionCertificate partition_independent(const GraphPartition& partition, const NodeSet& a_blocks,
                                           const NodeSet& b_blocks, const NodeSet& c_blocks) {
  PartitionCertificate cert;
  cert.block_level = ctbn_independent(partition.graph, a_blocks, b_blocks, c_blocks);
  cert.a = partition.unroll(a_blocks);
  cert.b = partition.unroll(b_blocks);
  cert.c = partition.unroll(c_blocks);
  return cert;
}

GraphPartition condensation(const DiGraph& g) {
  // Iterative Tarjan.
  const std::size_t n = g.node_count();
  constexpr auto unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  std::vector<NodeSet> components;
  std::size_t counter = 0;

  struct Frame {
    NodeId v;
    NodeSet::const_iterator next;
  };
  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    std::vector<Frame> frames{{root, g.children(root).begin()}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.next != g.children(f.v).end()) {
        NodeId w = *f.next++;
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, g.children(w).begin()});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      NodeId v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] == index[v]) {
        NodeSet comp;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.insert(w);
        } while (w != v);
        components.push_back(std::move(comp));
      }
    }
  }
  std::sort(components.begin(), components.end(),
            [](const NodeSet& a, const NodeSet& b) { return *a.begin() < *b.begin(); });
  return graph_partition(g, components);
}

std::optional<std::vector<NodeId>> topological_order(const DiGraph& g) {
  std::vector<std::size_t> indegree(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) indegree[v] = g.parents(v).size();
  std::deque<NodeId> ready;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::vector<NodeId> order;
  while (!ready.empty()) {
    NodeId v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (auto w : g.children(v))
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != g.node_count()) return std::nullopt;
  return order;
}

bool is_acyclic(const DiGraph& g) { return topological_order(g).has_value(); }

SccCertificate nonadjacent_scc_independence(const DiGraph& g, const GraphPartition& cond, std::size_t block_i,
                                            std::size_t block_j) {
  if (block_i >= cond.blocks.size() || block_j >= cond.blocks.size() || block_i == block_j)
    throw DomainError("two distinct condensation blocks required");
  if (cond.block_of.size() != g.node_count() || !is_acyclic(cond.graph))
    throw DomainError("partition is not a condensation of the graph");
  if (cond.graph.has_edge(block_i, block_j) || cond.graph.has_edge(block_j, block_i))
    throw DomainError("blocks are adjacent; no certificate");

  const DiGraph& d = cond.graph;
  // i is a descendant of j iff j is an ancestor of i
  bool i_below_j = ancestors(d, {block_i}).count(block_j) > 0;
  bool j_below_i = ancestors(d, {block_j}).count(block_i) > 0;

  NodeSet p_i = cond.unroll(parents(d, {block_i}));
  NodeSet p_j = cond.unroll(parents(d, {block_j}));
  std::size_t conditioned;
  if (i_below_j) {
    conditioned = block_i;
  } else if (j_below_i) {
    conditioned = block_j;
  } else {
    conditioned = p_i.size() < p_j.size() ? block_i : block_j;
  }
  SccCertificate cert;
  cert.conditioned_block = conditioned;
  cert.separating_set = conditioned == block_i ? p_i : p_j;
  cert.verification = ctbn_independent(g, cond.blocks[block_i], cond.blocks[block_j], cert.separating_set);
  return cert;
}

CtbnModel ancestral_subprocess(const CtbnModel& model, const NodeSet& a) {
  DiGraph g = ctbn_graph(model);
  if (!is_ancestral(g, a)) throw DomainError("process set is not ancestral");

  ModelData data;
  for (auto j : a) {
    data.processes.push_back(model.process(j));
    data.cims.push_back(model.cim(j));
  }
  const auto& space = model.state_space();
  if (auto s = model.initial_state()) {
    StateVector restricted;
    for (auto j : a) restricted.values.push_back((*s)[j]);
    data.initial = restricted;
  } else {
    const auto& dist = std::get<std::vector<double>>(model.data().initial);
    std::vector<int> card;
    for (auto j : a) card.push_back(model.cardinality(j));
    StateSpace sub(card);
    std::vector<double> marginal(sub.size(), 0.0);
    for (StateIndex x = 0; x < dist.size(); ++x) {
      StateVector full = space.state(x);
      StateVector part;
      for (auto j : a) part.values.push_back(full[j]);
      marginal[sub.index(part)] += dist[x];
    }
    data.initial = marginal;
  }
  return CtbnModel(std::move(data));
}

}  // namespace ctbn
