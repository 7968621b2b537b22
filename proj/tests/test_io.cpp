#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ctbn/io.hpp"
#include "support.hpp"

using namespace ctbn;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ctbn_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const char* kToggle = R"({
  "processes": [{"name": "X", "cardinality": 2, "parents": []}],
  "cims": [[[[-1.0, 1.0], [2.0, -2.0]]]],
  "initial_state": [1]
})";

}  // namespace

TEST_CASE("model documents round-trip") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = testing::random_model(rng, 36);
    auto text = model_json(m.data());
    CHECK(parse_model(text).data == m.data());
    CHECK(model_json(parse_model(text).data) == text);
  }
  auto d = chain3_model().data();
  d.initial = std::vector<double>{0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125};
  CHECK(parse_model(model_json(d)).data == d);

  auto path = scratch("chain3.json");
  save_model(path, chain3_model().data());
  CHECK(load_model(path).data() == chain3_model().data());
}

TEST_CASE("model parsing details") {
  auto t = parse_model(kToggle).data;
  CHECK(t.processes[0].name == "X");
  CHECK(std::get<StateVector>(t.initial) == StateVector{1});
  CHECK(t.cims[0].matrices[0](1, 0) == 2.0);

  // cardinality and parents default, a missing initial state is all zeros
  auto bare = parse_model(R"({"processes": [{"name": "X"}], "cims": [[[[-1, 1], [1, -1]]]]})").data;
  CHECK(bare.processes[0].cardinality == 2);
  CHECK(bare.processes[0].parents.empty());
  CHECK(std::get<StateVector>(bare.initial) == StateVector{0});
}

TEST_CASE("unknown fields are ignored unless strict") {
  std::string typo = R"({
    "processes": [{"name": "X", "cardinality": 2, "parnets": ["Y"]}],
    "cims": [[[[-1.0, 1.0], [2.0, -2.0]]]]
  })";
  auto loose = parse_model(typo);
  CHECK(loose.data.processes[0].parents.empty());
  CHECK_THROWS_AS(parse_model(typo, {true, true}), ParseError);

  std::string extra = std::string(kToggle).insert(1, "\"comment\": \"x\",");
  CHECK_NOTHROW(parse_model(extra));
  CHECK_THROWS_AS(parse_model(extra, {true, true}), ParseError);
  CHECK_NOTHROW(parse_model(kToggle, {true, true}));
}

TEST_CASE("malformed model documents") {
  CHECK_THROWS_AS(parse_model(R"({"processes": [)"), ParseError);
  CHECK_THROWS_AS(parse_model("[]"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"cims": []})"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"processes": [{"name": 3}], "cims": []})"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"processes": [{"name": "X"}], "cims": [[[[-1, 1]]]]})"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"processes": [{"name": "X"}], "cims": [[[[-1, "a"], [1, -1]]]]})"), ParseError);
  std::string both = std::string(kToggle).insert(1, "\"initial_distribution\": [0.5, 0.5],");
  CHECK_THROWS_AS(parse_model(both), ParseError);
  CHECK_THROWS_AS(read_model_file(scratch("does_not_exist.json")), ParseError);
}

TEST_CASE("load-time warnings") {
  auto chain = read_model_file(testing::models_dir() + "/chain3.json");
  REQUIRE(chain.warnings.size() == 1);
  CHECK(chain.warnings[0].kind == Violation::Kind::sign_normalized);

  auto frozen = read_model_file(testing::models_dir() + "/frozen.json");
  CHECK_FALSE(frozen.warnings.empty());
  for (const auto& w : frozen.warnings) CHECK(w.kind == Violation::Kind::zero_exit_rate);
  CHECK(validate_model(frozen.data).empty());

  CHECK_THROWS_AS(load_model(testing::models_dir() + "/bad_row_sum.json"), InvalidModel);
}

TEST_CASE("violations serialise as JSON") {
  auto v = validate_model(read_model_file(testing::models_dir() + "/bad_row_sum.json").data);
  REQUIRE(v.size() == 1);
  auto j = json::parse(violation_json(v[0]));
  CHECK(j["kind"] == "row_sum");
  CHECK(j["process"] == "B");
  CHECK(j["severity"] == "error");
  CHECK(j["detail"].is_string());
}

TEST_CASE("trajectory CSV layout") {
  Trajectory t{{0, 1}, {{0.5, 0, 1}, {1.25, 1, 0}}, 2.0};
  std::ostringstream os;
  write_trajectory_csv(os, t, {"A", "B"});
  CHECK(os.str() == "time,process,state\n0.0,A,0\n0.0,B,1\n0.5,A,1\n1.25,B,0\n");

  std::ostringstream many;
  write_trajectories_csv(many, {t, t}, {"A", "B"});
  std::string expected = "trajectory_id,time,process,state\n";
  for (int k = 0; k < 2; ++k)
    expected += std::to_string(k) + ",0.0,A,0\n" + std::to_string(k) + ",0.0,B,1\n" + std::to_string(k) +
                ",0.5,A,1\n" + std::to_string(k) + ",1.25,B,0\n";
  CHECK(many.str() == expected);
}

TEST_CASE("trajectory CSV round-trips bit for bit") {
  auto m = chain3_model();
  std::vector<std::string> names{"A", "B", "C"};
  auto ens = sample_ensemble(m, {0, 0, 0}, {30.0, 25, 7, 1});

  std::ostringstream os;
  write_trajectories_csv(os, ens, names);
  std::istringstream is(os.str());
  auto back = read_trajectories_csv(is, 30.0);
  CHECK(back.process_names == names);
  CHECK(back.trajectories == ens);

  std::ostringstream single;
  write_trajectory_csv(single, ens[3], names);
  std::istringstream one(single.str());
  auto b = read_trajectories_csv(one, 30.0);
  REQUIRE(b.trajectories.size() == 1);
  CHECK(b.trajectories[0] == ens[3]);

  std::ostringstream again;
  write_trajectories_csv(again, back.trajectories, names);
  CHECK(again.str() == os.str());
}

TEST_CASE("trajectory CSV reader edge cases") {
  std::istringstream empty("");
  CHECK(read_trajectories_csv(empty).trajectories.empty());

  std::istringstream no_t_end("time,process,state\n0.0,A,0\n0.7,A,1\n");
  CHECK(read_trajectories_csv(no_t_end).trajectories[0].t_end == 0.7);

  std::istringstream bad_header("t,p,s\n");
  CHECK_THROWS_AS(read_trajectories_csv(bad_header), ParseError);
  std::istringstream bad_number("time,process,state\n0.0,A,0\nx,A,1\n");
  CHECK_THROWS_AS(read_trajectories_csv(bad_number), ParseError);
  std::istringstream unknown("time,process,state\n0.0,A,0\n1.0,B,1\n");
  CHECK_THROWS_AS(read_trajectories_csv(unknown), ParseError);
  std::istringstream backwards("time,process,state\n0.0,A,0\n2.0,A,1\n1.0,A,0\n");
  CHECK_THROWS_AS(read_trajectories_csv(backwards), ParseError);
  std::istringstream no_change("time,process,state\n0.0,A,0\n1.0,A,0\n");
  CHECK_THROWS_AS(read_trajectories_csv(no_change), ParseError);
  std::istringstream late("time,process,state\n0.0,A,0\n5.0,A,1\n");
  CHECK_THROWS_AS(read_trajectories_csv(late, 2.0), ParseError);
  std::istringstream mixed("trajectory_id,time,process,state\n0,0.0,A,0\n1,0.0,B,0\n");
  CHECK_THROWS_AS(read_trajectories_csv(mixed), ParseError);
}

TEST_CASE("report CSVs") {
  StateSpace space({2, 2});
  auto ranking = rednt(EdntTable::from_exact({1.0, 2.0, 4.0, 1.0}), StateSpaceGraph(space));
  std::ostringstream sentry;
  write_sentry_csv(sentry, ranking, space);
  CHECK(sentry.str() ==
        "state_bits,ednt,ednt_stderr,rednt,active_alarms\n"
        "10,4,0,4,1\n"
        "01,2,0,2,1\n"
        "00,1,0,1,0\n"
        "11,1,0,1,2\n");

  Trajectory t{{0, 0}, {{1.0, 0, 1}, {1.1, 1, 1}, {1.2, 0, 0}, {4.0, 1, 0}}, 5.0};
  NaiveParams p{0.5, 2};
  std::ostringstream cascades;
  write_cascade_csv(cascades, {t}, p, 3);
  CHECK(cascades.str() == "trajectory_id,start_time,end_time,length,sentry_state_bits\n3,1.1000000000000001,1.2,2,10\n");

  std::ostringstream naive;
  write_naive_csv(naive, naive_scores({t}, p), {{1, 0}, {1, 1}});
  CHECK(naive.str() == "state_bits,naive_count,visits,naive_score\n10,1,1,1\n11,0,1,0\n");

  std::ostringstream comparison;
  write_comparison_csv(comparison, {{1, 1.0}, {2, 1.0 / 3.0}});
  CHECK(comparison.str() == "k,jaccard\n1,1\n2,0.3333333333333333\n");

  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("DOT output") {
  auto g = DiGraph::from_edges({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
  CHECK(to_dot(g) == "digraph \"ctbn\" {\n  \"A\";\n  \"B\";\n  \"C\";\n  \"A\" -> \"B\";\n  \"B\" -> \"C\";\n}\n");
  auto moral = to_dot(moralize(DiGraph::from_edges({"A", "B", "C"}, {{"A", "C"}, {"B", "C"}})));
  CHECK(moral.find("\"A\" -- \"B\";") != std::string::npos);
  auto cube = state_space_dot(StateSpaceGraph(StateSpace({2, 2, 2})));
  CHECK(cube.find("\"000\" -- \"100\";") != std::string::npos);
  CHECK(std::count(cube.begin(), cube.end(), '\n') == 1 + 8 + 12 + 1);
}

TEST_CASE("certificates") {
  auto g = read_graph_file(testing::models_dir() + "/ess_systems.graph.json");
  auto cert = ctbn_independent(g, g.ids({"P1", "T1"}), g.ids({"P3", "T3"}), g.ids({"P2", "T2", "S1", "S2", "S3", "S4"}));
  auto j = json::parse(certificate_json(cert, g));
  CHECK(j["separated"] == true);
  CHECK(j["A"] == json({"P1", "T1"}));
  CHECK(j["ancestral_set"].size() == 10);
  CHECK(j["moral_edges_added"].is_array());

  auto p = read_partition_file(testing::models_dir() + "/ess_systems.partition.json", g);
  auto pj = json::parse(certificate_json(partition_independent(p, {0}, {2}, {1, 3}), p, g));
  CHECK(pj["separated"] == true);
  CHECK(pj["A"] == json({"System 1"}));
  CHECK(pj["unrolled"]["A"] == json({"P1", "T1"}));

  auto cc = DiGraph::from_edges({}, {{"A", "B"}, {"B", "C"}, {"C", "A"}, {"C", "D"}, {"D", "E"}, {"E", "F"}});
  auto cond = condensation(cc);
  auto sj = json::parse(certificate_json(nonadjacent_scc_independence(cc, cond, 0, 2), cond, cc));
  CHECK(sj["separating_set"] == json({"D"}));
  CHECK(sj["conditioned_block"] == "{E}");
  CHECK(sj["verification"]["separated"] == true);
}

TEST_CASE("graph and partition files") {
  auto from_model = read_graph_file(testing::models_dir() + "/chain3.json");
  CHECK(from_model.edges() == std::vector<Edge>{{0, 1}, {1, 2}});

  auto bad = scratch("bad_graph.json");
  std::ofstream(bad) << R"({"edges": [["A"]]})";
  CHECK_THROWS_AS(read_graph_file(bad), ParseError);

  auto g = read_graph_file(testing::models_dir() + "/ess_systems.graph.json");
  auto part = scratch("partial.json");
  std::ofstream(part) << R"({"blocks": [{"name": "one", "nodes": ["P1"]}]})";
  CHECK_THROWS_AS(read_partition_file(part, g), DomainError);
  auto broken = scratch("broken.json");
  std::ofstream(broken) << R"({"blocks": [{"nodes": ["P1"]}]})";
  CHECK_THROWS_AS(read_partition_file(broken, g), ParseError);
}
