#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctbn/error.hpp"

namespace ctbn {

class CtbnModel;

using NodeId = std::size_t;
using NodeSet = std::set<NodeId>;
using Edge = std::pair<NodeId, NodeId>;

/// Directed graph with named nodes. Cycles are allowed; self-loops and
/// duplicate edges are not.
class DiGraph {
 public:
  DiGraph() = default;
  explicit DiGraph(std::vector<std::string> names);
  /// Builds from an edge list over names; nodes are added in first-seen order
  /// after the ones listed in `nodes`.
  static DiGraph from_edges(std::vector<std::string> nodes,
                            const std::vector<std::pair<std::string, std::string>>& edges);

  NodeId add_node(std::string name);
  /// Returns false when the edge already exists. Throws DomainError on
  /// self-loops or unknown endpoints.
  bool add_edge(NodeId from, NodeId to);
  bool add_edge(const std::string& from, const std::string& to);

  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept;
  const std::string& name(NodeId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<NodeId> find(const std::string& name) const;
  /// Throws DomainError for unknown names.
  NodeId id(const std::string& name) const;
  NodeSet ids(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(const NodeSet& nodes) const;

  bool has_edge(NodeId from, NodeId to) const { return out_.at(from).count(to) > 0; }
  const NodeSet& parents(NodeId v) const { return in_.at(v); }
  const NodeSet& children(NodeId v) const { return out_.at(v); }
  std::vector<Edge> edges() const;
  NodeSet all_nodes() const;

  bool operator==(const DiGraph&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<NodeSet> out_;
  std::vector<NodeSet> in_;
};

/// Undirected simple graph with named nodes.
class UGraph {
 public:
  UGraph() = default;
  explicit UGraph(std::vector<std::string> names);

  bool add_edge(NodeId a, NodeId b);
  std::size_t node_count() const noexcept { return names_.size(); }
  const std::string& name(NodeId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool adjacent(NodeId a, NodeId b) const { return adj_.at(a).count(b) > 0; }
  const NodeSet& neighbors(NodeId v) const { return adj_.at(v); }
  /// Each edge once, smaller id first.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::string> names_;
  std::vector<NodeSet> adj_;
};

/// The CTBN graph: one node per process, edge parent -> child.
DiGraph ctbn_graph(const CtbnModel& model);

/// Pa(A): union of the parents of members, minus A.
NodeSet parents(const DiGraph& g, const NodeSet& a);
/// Cl(A) = Pa(A) u A.
NodeSet closure(const DiGraph& g, const NodeSet& a);
/// An(A): A together with every node that has a directed path into A.
NodeSet ancestors(const DiGraph& g, const NodeSet& a);
bool is_ancestral(const DiGraph& g, const NodeSet& a);
/// Graph on node set A (ids renumbered in increasing original id order,
/// names kept) with exactly the edges having both endpoints in A.
DiGraph induced_subgraph(const DiGraph& g, const NodeSet& a);

/// Undirected skeleton plus an edge between every pair of co-parents.
UGraph moralize(const DiGraph& g);
/// Marriages moralize adds that are not already skeleton edges.
std::vector<Edge> moral_edges_added(const DiGraph& g);

/// True iff every path from A to B in `ug` meets C. Throws DomainError when
/// the sets are not disjoint.
bool separated(const UGraph& ug, const NodeSet& a, const NodeSet& b, const NodeSet& c);

struct IndependenceCertificate {
  NodeSet a, b, c;
  bool separated = false;
  NodeSet ancestral_set;
  /// In ids of the source graph.
  std::vector<Edge> moral_edges_added;
};

/// Separation of A and B by C in the moral graph of the subgraph induced by
/// An(A u B u C). A true result certifies that the histories of A and B are
/// conditionally independent given the history of C.
IndependenceCertificate ctbn_independent(const DiGraph& g, const NodeSet& a, const NodeSet& b,
                                         const NodeSet& c);

/// Quotient of a graph by a partition of its nodes.
struct GraphPartition {
  std::vector<NodeSet> blocks;
  std::vector<std::size_t> block_of;  // node id -> block index
  DiGraph graph;                      // node i is blocks[i]

  /// Union of the given blocks.
  NodeSet unroll(const NodeSet& block_ids) const;
};

/// Throws DomainError when the blocks overlap, miss nodes, or are empty.
/// Block names default to "{a,b,...}".
GraphPartition graph_partition(const DiGraph& g, const std::vector<NodeSet>& blocks,
                               std::vector<std::string> block_names = {});

struct PartitionCertificate {
  IndependenceCertificate block_level;  // ids are block indices
  NodeSet a, b, c;                      // unrolled node sets
};

/// Separation evaluated on the partition graph; a true answer implies the
/// node-level separation of the unrolled sets.
PartitionCertificate partition_independent(const GraphPartition& partition, const NodeSet& a_blocks,
                                           const NodeSet& b_blocks, const NodeSet& c_blocks);

/// Partition by strongly connected components, blocks ordered by their
/// smallest node id.
GraphPartition condensation(const DiGraph& g);

/// Kahn order when acyclic.
std::optional<std::vector<NodeId>> topological_order(const DiGraph& g);
bool is_acyclic(const DiGraph& g);

struct SccCertificate {
  std::size_t conditioned_block;  // the block whose parents form the separating set
  NodeSet separating_set;
  IndependenceCertificate verification;
};

/// For two condensation blocks with no edges between them, the union of the
/// parent blocks of one of them separates the two. Throws DomainError when
/// the blocks are adjacent in g or not blocks of `cond`.
SccCertificate nonadjacent_scc_independence(const DiGraph& g, const GraphPartition& cond, std::size_t block_i,
                                            std::size_t block_j);

/// The sub-CTBN on an ancestral process set: same CIMs, graph restricted to
/// A, initial distribution marginalised. Throws DomainError when A is not
/// ancestral.
CtbnModel ancestral_subprocess(const CtbnModel& model, const NodeSet& a);

}  // namespace ctbn
