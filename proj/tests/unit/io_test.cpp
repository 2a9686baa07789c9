#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sqsd/case_studies.hpp"
#include "sqsd/error.hpp"
#include "sqsd/io.hpp"
#include "test_support.hpp"

using namespace sqsd;
using sqsd::testing::kPi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sqsd::Error");
  return ErrorCode::InvalidConfig;
}

PlanTables small_plan() {
  BinaryScenario scn;
  scn.resolution = 200;
  scn.library_size = 37;
  scn.horizon = 3;
  const auto cfg = binary_config(scn);
  CostCounters c;
  return plan(cfg, c);
}

const char* kBinaryEnsemble = R"({
  "states": [
    [[1, 0], [0, 0], [0, 0], [0, 0]],
    [[0.25, 0], [0.4330127018922193, 0], [0.4330127018922193, 0], [0.75, 0]]
  ],
  "prior": [0.5, 0.5],
  "measurement": {"family": "binary", "count": 12}
})";

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, kPi, 1e-300, -2.5e17, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("table CSV round trip") {
  const auto tables = small_plan();
  std::stringstream ss;
  write_tables_csv(ss, tables);
  const auto back = read_tables_csv(ss);
  CHECK(back.values == tables.values);
  CHECK(back.policy == tables.policy);

  std::stringstream bad("stage,point_id,value\n0,0,1\n");
  CHECK(code_of([&] { read_tables_csv(bad); }) == ErrorCode::InvalidConfig);
  std::stringstream ragged("stage,point_id,value,action_kind,action_index\n0,0,1.0,stop\n");
  CHECK(code_of([&] { read_tables_csv(ragged); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("binary value layout") {
  const auto tables = small_plan();
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_values_binary(ss, tables.values, 2);
  const std::string bytes = ss.str();
  CHECK(bytes.size() == 24 + 8 * 4 * 201);
  // Header fields are little-endian uint64.
  CHECK(static_cast<unsigned char>(bytes[0]) == 3);
  CHECK(static_cast<unsigned char>(bytes[8]) == 201);
  CHECK(static_cast<unsigned char>(bytes[16]) == 2);

  const auto back = read_values_binary(ss);
  CHECK(back.horizon == 3);
  CHECK(back.points == 201);
  CHECK(back.hypotheses == 2);
  CHECK(back.values == tables.values);

  std::stringstream cut(bytes.substr(0, 40), std::ios::in | std::ios::binary);
  CHECK(code_of([&] { read_values_binary(cut); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("golden value table") {
  // Frozen from a reviewed run; set SQSD_UPDATE_GOLDEN=1 to rewrite after an intended change.
  const auto tables = small_plan();
  const std::string path = std::string(SQSD_GOLDEN_DIR) + "/binary_n200_h3.bin";
  if (std::getenv("SQSD_UPDATE_GOLDEN")) {
    std::ofstream out(path, std::ios::binary);
    write_values_binary(out, tables.values, 2);
  }
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  const auto golden = read_values_binary(in);
  CHECK(golden.values == tables.values);
}

TEST_CASE("grid CSV") {
  std::stringstream ss;
  write_grid_csv(ss, build_grid(2, 3));
  std::string header, first;
  std::getline(ss, header);
  std::getline(ss, first);
  CHECK(header == "point_id,c1,c2,c3,b1,b2,b3,x,y");
  CHECK(first.rfind("0,0,0,2,0,0,1,0.5,", 0) == 0);
}

TEST_CASE("JSON reports parse back") {
  BinaryScenario scn;
  scn.resolution = 20;
  scn.library_size = 5;
  const auto cfg = binary_config(scn, ProjectionMode::Raw);
  CostCounters c;
  const auto tables = plan(cfg, c);

  const auto counters = nlohmann::json::parse(counters_json(c));
  CHECK(counters["projections"].get<std::uint64_t>() == c.projections);

  const auto complexity = nlohmann::json::parse(complexity_json(complexity_report(cfg, c), c));
  CHECK(complexity["all_match"].get<bool>());
  CHECK(complexity["mode"] == "raw");

  const auto summary = monte_carlo(cfg, tables, 100, 4);
  const auto sj = nlohmann::json::parse(summary_json(summary, "abc"));
  CHECK(sj["config_hash"] == "abc");
  CHECK(sj["episodes"] == 100);

  auto rng = CounterRng::substream(4, 0);
  const auto tj = nlohmann::json::parse(trace_json_line(0, run_episode(cfg, tables, rng)));
  CHECK(tj["beliefs"].size() == tj["outcomes"].size() + 1);

  const auto trine = trine_config(TrineScenario{});
  const auto rj = nlohmann::json::parse(routing_json("A", trine_routing(trine, Belief::uniform(3))));
  CHECK(rj["branches"].size() == 3);
  CHECK(rj["case"] == "A");
}

TEST_CASE("ensemble parsing") {
  const auto e = parse_ensemble(kBinaryEnsemble);
  CHECK(e.states.size() == 2);
  CHECK(e.library.size() == 12);
  CHECK(e.library.family() == MeasurementFamily::Binary);
  // The second state is the theta = pi/3 binary state.
  const auto ref = binary_states(kPi / 3);
  CHECK((e.states[1].matrix() - ref[1].matrix()).norm() < 1e-12);

  const auto explicit_lib = parse_ensemble(R"({
    "states": [[[1,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[1,0]]],
    "prior": [0.3, 0.7],
    "measurement": {"family": "explicit",
                    "povms": [[[[1,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[1,0]]]]}
  })");
  CHECK(explicit_lib.library.size() == 1);
  CHECK(explicit_lib.prior[1] == 0.7);

  CHECK(code_of([] { parse_ensemble("{not json"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_ensemble(R"({"states": [], "prior": []})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] {
          parse_ensemble(R"({"states": [[[1,0],[0,0],[0,0]], [[1,0]]], "prior": [0.5,0.5],
                             "measurement": {"family": "binary", "count": 2}})");
        }) == ErrorCode::NotSquare);
  CHECK(code_of([] {
          parse_ensemble(R"({"states": [[[2,0],[0,0],[0,0],[0,0]], [[1,0],[0,0],[0,0],[0,0]]],
                             "prior": [0.5,0.5], "measurement": {"family": "binary", "count": 2}})");
        }) == ErrorCode::BadTrace);
  CHECK(code_of([] {
          parse_ensemble(R"({"states": [[[1,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[1,0]]],
                             "prior": [0.5,0.5], "measurement": {"family": "binary"}})");
        }) == ErrorCode::MissingParams);
  CHECK(code_of([] {
          parse_ensemble(R"({"states": [[[1,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[1,0]]],
                             "prior": "uniform", "measurement": {"family": "binary", "count": 2}})");
        }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] {
          parse_ensemble(R"({"states": [[[1,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[1,0]]],
                             "prior": [0.5,0.5], "measurement": {"family": "pentagon"}})");
        }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { load_ensemble("/nonexistent/ensemble.json"); }) == ErrorCode::InvalidConfig);
}
