#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctbn/cascade.hpp"
#include "ctbn/graph.hpp"
#include "ctbn/model.hpp"
#include "ctbn/sentry.hpp"
#include "ctbn/simulator.hpp"
#include "ctbn/state_space.hpp"

namespace ctbn {

// ---- model files ----

struct ModelReadOptions {
  bool reject_unknown_fields = false;
  /// Negate rows with transposed signs (see normalize_transposed_rows).
  bool normalize = true;
};

struct LoadedModel {
  ModelData data;
  /// Sign repairs and absorbing-state notices.
  std::vector<Violation> warnings;
};

/// Parses a model document. Throws ParseError on malformed JSON or fields of
/// the wrong type; semantic checks are left to validate_model.
LoadedModel parse_model(const std::string& text, const ModelReadOptions& options = {});
/// Throws ParseError when the file cannot be read.
LoadedModel read_model_file(const std::filesystem::path& path, const ModelReadOptions& options = {});
/// read_model_file followed by validation; throws InvalidModel.
CtbnModel load_model(const std::filesystem::path& path, const ModelReadOptions& options = {});

std::string model_json(const ModelData& data);
void save_model(const std::filesystem::path& path, const ModelData& data);

std::string violation_json(const Violation& v);

// ---- trajectories ----

/// `time,process,state`: one time-0 row per process with its initial local
/// state, then the events. Times are written with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<std::string>& names);
/// Same rows with a leading trajectory_id column.
void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories,
                            const std::vector<std::string>& names);

struct TrajectoryFile {
  std::vector<std::string> process_names;  // from the time-0 rows
  std::vector<Trajectory> trajectories;
};

/// Reads either layout. The leading time-0 rows of each trajectory fix the
/// process order. t_end is `t_end` when given, otherwise the last event time.
/// An empty input yields no trajectories. Throws ParseError.
TrajectoryFile read_trajectories_csv(std::istream& in, std::optional<double> t_end = std::nullopt);
TrajectoryFile read_trajectories_file(const std::filesystem::path& path, std::optional<double> t_end = std::nullopt);

// ---- reports ----

/// `state_bits,ednt,ednt_stderr,rednt,active_alarms`, in ranking order.
void write_sentry_csv(std::ostream& out, const RedntRanking& ranking, const StateSpace& space);
/// `trajectory_id,start_time,end_time,length,sentry_state_bits`.
void write_cascade_csv(std::ostream& out, const std::vector<Trajectory>& trajectories, const NaiveParams& params,
                       std::size_t first_id = 0);
/// `state_bits,naive_count,visits,naive_score`, in the given order.
void write_naive_csv(std::ostream& out, const NaiveScores& scores, const std::vector<StateVector>& order);
/// `k,jaccard`.
void write_comparison_csv(std::ostream& out, const std::vector<std::pair<std::size_t, double>>& jaccard);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

// ---- graphs ----

std::string to_dot(const DiGraph& g, const std::string& title = "ctbn");
std::string to_dot(const UGraph& g, const std::string& title = "moral");
/// Nodes are blocks, labelled with their names.
std::string partition_dot(const GraphPartition& p, const std::string& title = "partition");
/// Joint states labelled by state_bits.
std::string state_space_dot(const StateSpaceGraph& g);

std::string certificate_json(const IndependenceCertificate& cert, const DiGraph& g);
std::string certificate_json(const PartitionCertificate& cert, const GraphPartition& p, const DiGraph& g);
std::string certificate_json(const SccCertificate& cert, const GraphPartition& cond, const DiGraph& g);

/// Either a model document (its CTBN graph) or a bare graph
/// {"nodes": [...], "edges": [["A", "B"], ...]}. Throws ParseError, or
/// InvalidModel for an invalid model document.
DiGraph read_graph_file(const std::filesystem::path& path);

/// Partition file: {"blocks": [{"name": "...", "nodes": ["P1", ...]}, ...]}.
GraphPartition read_partition_file(const std::filesystem::path& path, const DiGraph& g);

}  // namespace ctbn
