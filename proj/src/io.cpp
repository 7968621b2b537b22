#include "ctbn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

namespace ctbn {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw ParseError("cannot read " + path.string());
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
  if (!out) throw ParseError("cannot write " + path.string());
}

void check_fields(const json& object, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ParseError("unknown field '" + key + "' in " + where);
  }
}

RateMatrix parse_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array()) throw ParseError(where + ": matrix must be an array of rows");
  RateMatrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != rows.size()) throw ParseError(where + ": matrix must be square");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number()) throw ParseError(where + ": rates must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

}  // namespace

LoadedModel parse_model(const std::string& text, const ModelReadOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model document must be a JSON object");
  if (options.reject_unknown_fields)
    check_fields(doc, {"processes", "cims", "initial_state", "initial_distribution"}, "model");

  LoadedModel out;
  try {
    if (!doc.contains("processes") || !doc["processes"].is_array()) throw ParseError("'processes' array required");
    for (const auto& p : doc["processes"]) {
      if (!p.is_object()) throw ParseError("process entries must be objects");
      if (options.reject_unknown_fields) check_fields(p, {"name", "cardinality", "parents"}, "process");
      ProcessSpec spec;
      spec.name = p.at("name").get<std::string>();
      spec.cardinality = p.value("cardinality", 2);
      if (p.contains("parents")) spec.parents = p["parents"].get<std::vector<std::string>>();
      out.data.processes.push_back(std::move(spec));
    }

    if (!doc.contains("cims") || !doc["cims"].is_array()) throw ParseError("'cims' array required");
    const auto& cims = doc["cims"];
    for (std::size_t j = 0; j < cims.size(); ++j) {
      if (!cims[j].is_array()) throw ParseError("cims[" + std::to_string(j) + "] must be an array");
      Cim cim;
      for (std::size_t c = 0; c < cims[j].size(); ++c)
        cim.matrices.push_back(parse_matrix(cims[j][c], "cims[" + std::to_string(j) + "][" + std::to_string(c) + "]"));
      out.data.cims.push_back(std::move(cim));
    }

    bool has_state = doc.contains("initial_state"), has_dist = doc.contains("initial_distribution");
    if (has_state && has_dist) throw ParseError("give either initial_state or initial_distribution, not both");
    if (has_dist) {
      out.data.initial = doc["initial_distribution"].get<std::vector<double>>();
    } else if (has_state) {
      out.data.initial = StateVector(doc["initial_state"].get<std::vector<LocalState>>());
    } else {
      out.data.initial = StateVector(std::vector<LocalState>(out.data.processes.size(), 0));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad model field: ") + e.what());
  }

  if (options.normalize) out.warnings = normalize_transposed_rows(out.data);
  auto absorbing = model_warnings(out.data);
  out.warnings.insert(out.warnings.end(), absorbing.begin(), absorbing.end());
  return out;
}

LoadedModel read_model_file(const std::filesystem::path& path, const ModelReadOptions& options) {
  return parse_model(read_text(path), options);
}

CtbnModel load_model(const std::filesystem::path& path, const ModelReadOptions& options) {
  return CtbnModel(read_model_file(path, options).data);
}

std::string model_json(const ModelData& data) {
  ordered doc;
  doc["processes"] = ordered::array();
  for (const auto& p : data.processes)
    doc["processes"].push_back({{"name", p.name}, {"cardinality", p.cardinality}, {"parents", p.parents}});
  doc["cims"] = ordered::array();
  for (const auto& cim : data.cims) {
    ordered matrices = ordered::array();
    for (const auto& m : cim.matrices) {
      ordered rows = ordered::array();
      for (std::size_t r = 0; r < m.side(); ++r) {
        auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
      }
      matrices.push_back(std::move(rows));
    }
    doc["cims"].push_back(std::move(matrices));
  }
  if (const auto* s = std::get_if<StateVector>(&data.initial))
    doc["initial_state"] = s->values;
  else
    doc["initial_distribution"] = std::get<std::vector<double>>(data.initial);
  return doc.dump(2) + "\n";
}

void save_model(const std::filesystem::path& path, const ModelData& data) { write_text(path, model_json(data)); }

std::string violation_json(const Violation& v) {
  ordered j;
  j["kind"] = to_string(v.kind);
  j["process"] = v.process;
  j["detail"] = v.detail;
  j["severity"] = v.warning ? "warning" : "error";
  return j.dump();
}

// ---- trajectories ----

namespace {

std::string time17(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

void write_rows(std::ostream& out, const Trajectory& t, const std::vector<std::string>& names,
                const std::string& prefix) {
  if (names.size() != t.initial_state.size()) throw DomainError("one process name per component required");
  for (std::size_t j = 0; j < names.size(); ++j)
    out << prefix << "0.0," << names[j] << ',' << t.initial_state[j] << '\n';
  for (const auto& e : t.events) out << prefix << time17(e.time) << ',' << names.at(e.process) << ',' << e.new_local_state << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, std::size_t line) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<std::string>& names) {
  out << "time,process,state\n";
  write_rows(out, trajectory, names, "");
}

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories,
                            const std::vector<std::string>& names) {
  out << "trajectory_id,time,process,state\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k)
    write_rows(out, trajectories[k], names, std::to_string(k) + ",");
}

TrajectoryFile read_trajectories_csv(std::istream& in, std::optional<double> t_end) {
  TrajectoryFile out;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) return out;

  bool with_id;
  if (line == "time,process,state")
    with_id = false;
  else if (line == "trajectory_id,time,process,state")
    with_id = true;
  else
    throw ParseError("unexpected trajectory header '" + line + "'");

  bool names_fixed = false;
  std::optional<long long> current_id;
  Trajectory* current = nullptr;
  std::vector<std::string> pending_names;

  auto finish = [&]() {
    if (!current) return;
    if (!names_fixed) {
      out.process_names = pending_names;
      names_fixed = true;
    } else if (pending_names != out.process_names) {
      throw ParseError("trajectories list different processes");
    }
    double last = current->events.empty() ? 0.0 : current->events.back().time;
    current->t_end = t_end.value_or(last);
    if (current->t_end < last) throw ParseError("event after the given t_end");
  };

  // Events are buffered with process names until the trajectory's initial
  // rows are complete.
  struct RawEvent {
    double time;
    std::string process;
    LocalState state;
    std::size_t line;
  };
  std::vector<RawEvent> raw;
  auto flush_events = [&]() {
    if (!current) return;
    std::map<std::string, ProcessId> local;
    for (std::size_t j = 0; j < pending_names.size(); ++j) local[pending_names[j]] = j;
    for (const auto& r : raw) {
      auto it = local.find(r.process);
      if (it == local.end()) throw ParseError("line " + std::to_string(r.line) + ": unknown process '" + r.process + "'");
      current->events.push_back({r.time, it->second, r.state});
    }
    raw.clear();
    finish();
  };

  while (next_line()) {
    auto f = split(line);
    if (f.size() != (with_id ? 4u : 3u)) throw ParseError("line " + std::to_string(line_no) + ": wrong field count");
    std::size_t o = with_id ? 1 : 0;
    long long id = with_id ? parse_int(f[0], line_no) : 0;
    double time = parse_double(f[o], line_no);
    const std::string& process = f[o + 1];
    auto state = static_cast<LocalState>(parse_int(f[o + 2], line_no));

    if (!current || (with_id && id != *current_id)) {
      flush_events();
      out.trajectories.emplace_back();
      current = &out.trajectories.back();
      current_id = id;
      pending_names.clear();
    }
    bool initial_row = time == 0.0 && current->events.empty() && raw.empty();
    if (initial_row) {
      if (std::find(pending_names.begin(), pending_names.end(), process) != pending_names.end())
        throw ParseError("line " + std::to_string(line_no) + ": repeated initial row for '" + process + "'");
      pending_names.push_back(process);
      current->initial_state.values.push_back(state);
    } else {
      if (!(time > 0.0)) throw ParseError("line " + std::to_string(line_no) + ": event time must be positive");
      raw.push_back({time, process, state, line_no});
    }
  }
  flush_events();

  for (const auto& t : out.trajectories) {
    auto problems = check_trajectory(t);
    if (!problems.empty()) throw ParseError("invalid trajectory: " + problems.front());
  }
  return out;
}

TrajectoryFile read_trajectories_file(const std::filesystem::path& path, std::optional<double> t_end) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_trajectories_csv(in, t_end);
}

// ---- reports ----

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_sentry_csv(std::ostream& out, const RedntRanking& ranking, const StateSpace& space) {
  out << "state_bits,ednt,ednt_stderr,rednt,active_alarms\n";
  for (const auto& e : ranking.entries)
    out << state_bits(space.state(e.state)) << ',' << format_double(e.ednt) << ',' << format_double(e.ednt_stderr)
        << ',' << format_double(e.rednt) << ',' << e.active_alarms << '\n';
}

void write_cascade_csv(std::ostream& out, const std::vector<Trajectory>& trajectories, const NaiveParams& params,
                       std::size_t first_id) {
  out << "trajectory_id,start_time,end_time,length,sentry_state_bits\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& t = trajectories[k];
    for (const auto& w : identify_cascades(t, params))
      out << first_id + k << ',' << time17(t.events[w.first_event].time) << ','
          << time17(t.events[w.last_event].time) << ',' << w.length() << ',' << state_bits(w.sentry_state) << '\n';
  }
}

void write_naive_csv(std::ostream& out, const NaiveScores& scores, const std::vector<StateVector>& order) {
  out << "state_bits,naive_count,visits,naive_score\n";
  for (const auto& s : order) {
    NaiveStat stat = scores.at(s);
    out << state_bits(s) << ',' << stat.count << ',' << stat.visits << ',' << format_double(stat.score()) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<std::pair<std::size_t, double>>& jaccard) {
  out << "k,jaccard\n";
  for (const auto& [k, j] : jaccard) out << k << ',' << format_double(j) << '\n';
}

// ---- graphs ----

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> names_of(const NodeSet& set, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (auto v : set) out.push_back(names.at(v));
  return out;
}

ordered cert_object(const IndependenceCertificate& cert, const std::vector<std::string>& names) {
  ordered j;
  j["A"] = names_of(cert.a, names);
  j["B"] = names_of(cert.b, names);
  j["C"] = names_of(cert.c, names);
  j["separated"] = cert.separated;
  j["ancestral_set"] = names_of(cert.ancestral_set, names);
  j["moral_edges_added"] = ordered::array();
  for (const auto& [u, v] : cert.moral_edges_added) j["moral_edges_added"].push_back({names.at(u), names.at(v)});
  return j;
}

}  // namespace

std::string to_dot(const DiGraph& g, const std::string& title) {
  std::ostringstream os;
  os << "digraph " << quoted(title) << " {\n";
  for (const auto& n : g.names()) os << "  " << quoted(n) << ";\n";
  for (const auto& [u, v] : g.edges()) os << "  " << quoted(g.name(u)) << " -> " << quoted(g.name(v)) << ";\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const UGraph& g, const std::string& title) {
  std::ostringstream os;
  os << "graph " << quoted(title) << " {\n";
  for (const auto& n : g.names()) os << "  " << quoted(n) << ";\n";
  for (const auto& [u, v] : g.edges()) os << "  " << quoted(g.name(u)) << " -- " << quoted(g.name(v)) << ";\n";
  os << "}\n";
  return os.str();
}

std::string partition_dot(const GraphPartition& p, const std::string& title) { return to_dot(p.graph, title); }

std::string state_space_dot(const StateSpaceGraph& g) {
  std::ostringstream os;
  os << "graph \"state_space\" {\n";
  const auto& space = g.space();
  for (StateIndex x = 0; x < g.node_count(); ++x) os << "  " << quoted(state_bits(space.state(x))) << ";\n";
  for (const auto& [x, y] : g.edges())
    os << "  " << quoted(state_bits(space.state(x))) << " -- " << quoted(state_bits(space.state(y))) << ";\n";
  os << "}\n";
  return os.str();
}

std::string certificate_json(const IndependenceCertificate& cert, const DiGraph& g) {
  return cert_object(cert, g.names()).dump();
}

std::string certificate_json(const PartitionCertificate& cert, const GraphPartition& p, const DiGraph& g) {
  ordered j = cert_object(cert.block_level, p.graph.names());
  j["unrolled"] = {{"A", names_of(cert.a, g.names())},
                   {"B", names_of(cert.b, g.names())},
                   {"C", names_of(cert.c, g.names())}};
  return j.dump();
}

std::string certificate_json(const SccCertificate& cert, const GraphPartition& cond, const DiGraph& g) {
  ordered j;
  j["conditioned_block"] = cond.graph.name(cert.conditioned_block);
  j["separating_set"] = names_of(cert.separating_set, g.names());
  j["verification"] = cert_object(cert.verification, g.names());
  return j.dump();
}

DiGraph read_graph_file(const std::filesystem::path& path) {
  std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("edges")) return ctbn_graph(CtbnModel(parse_model(text).data));
  try {
    std::vector<std::string> nodes = doc.value("nodes", std::vector<std::string>{});
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("edges must be [from, to] pairs");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return DiGraph::from_edges(nodes, edges);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad graph file: ") + e.what());
  }
}

GraphPartition read_partition_file(const std::filesystem::path& path, const DiGraph& g) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed partition file: ") + e.what());
  }
  std::vector<NodeSet> blocks;
  std::vector<std::string> names;
  try {
    for (const auto& b : doc.at("blocks")) {
      names.push_back(b.at("name").get<std::string>());
      blocks.push_back(g.ids(b.at("nodes").get<std::vector<std::string>>()));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad partition file: ") + e.what());
  }
  return graph_partition(g, blocks, names);
}

}  // namespace ctbn
