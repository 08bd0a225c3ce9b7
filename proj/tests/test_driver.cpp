#include "funnel/driver.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using namespace funnel;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& stem, const std::string& body) {
    path = std::filesystem::temp_directory_path() / stem;
    std::ofstream out(path);
    out << body;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

SolveOutcome outcome_with(Phase1Result::Status p1,
                          std::optional<Phase2Result::Status> p2 = {}) {
  SolveOutcome oc;
  oc.p1.status = p1;
  if (p2) {
    Phase2Result r;
    r.status = *p2;
    oc.p2 = r;
  }
  return oc;
}

}  // namespace

TEST_CASE("manifest formats") {
  SUBCASE("JSON array of names") {
    TempFile f("manifest_array.json", R"(["MARATOS", "HS6"])");
    const auto names = read_manifest(f.path.string());
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "MARATOS");
    CHECK(names[1] == "HS6");
  }
  SUBCASE("JSON object with a problems array and name entries") {
    TempFile f("manifest_obj.json",
               R"({"problems": ["BT10", {"name": "HS7"}]})");
    const auto names = read_manifest(f.path.string());
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "BT10");
    CHECK(names[1] == "HS7");
  }
  SUBCASE("newline-separated text with comments") {
    TempFile f("manifest_text.txt", "# corpus slice\nMARATOS\n\n  HS6  \n");
    const auto names = read_manifest(f.path.string());
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "MARATOS");
    CHECK(names[1] == "HS6");
  }
  SUBCASE("unknown names are rejected") {
    TempFile f("manifest_bad.txt", "MARATOS\nNOT_A_PROBLEM\n");
    CHECK_THROWS_AS(read_manifest(f.path.string()), std::out_of_range);
  }
  SUBCASE("missing files are rejected") {
    CHECK_THROWS_AS(read_manifest("/nonexistent/manifest.txt"),
                    std::runtime_error);
  }
  SUBCASE("object without a problems key is rejected") {
    TempFile f("manifest_nokey.json", R"({"runs": []})");
    CHECK_THROWS_AS(read_manifest(f.path.string()), std::runtime_error);
  }
}

TEST_CASE("exit codes classify the outcome") {
  using P1 = Phase1Result::Status;
  using P2 = Phase2Result::Status;
  CHECK(exit_code_for(outcome_with(P1::infeasible_stationary)) == 1);
  CHECK(exit_code_for(outcome_with(P1::iter_limit)) == 2);
  CHECK(exit_code_for(outcome_with(P1::eval_error)) == 2);
  CHECK(exit_code_for(outcome_with(P1::near_feasible)) == 2);  // no phase 2
  CHECK(exit_code_for(outcome_with(P1::near_feasible, P2::relative_kkt)) == 0);
  CHECK(exit_code_for(outcome_with(P1::near_feasible,
                                   P2::infeasibility_stationary)) == 1);
  CHECK(exit_code_for(outcome_with(P1::near_feasible, P2::iter_limit)) == 2);
  CHECK(exit_code_for(outcome_with(P1::near_feasible, P2::eval_error)) == 2);
}

TEST_CASE("full pipeline on MARATOS") {
  RunConfig cfg;
  cfg.problem = "MARATOS";
  cfg.audit = true;
  const NlpProblem p = corpus_lookup(cfg.problem);
  const SolveOutcome oc = run_solver(p, cfg);

  CHECK(exit_code_for(oc) == 0);
  CHECK(oc.p1.status == Phase1Result::Status::near_feasible);
  REQUIRE(oc.p2.has_value());
  CHECK(oc.p2->status == Phase2Result::Status::relative_kkt);

  CHECK(oc.row.problem == "MARATOS");
  CHECK(oc.row.n == 2);
  CHECK(oc.row.m == 1);
  CHECK(oc.row.p1_status == "near_feasible");
  CHECK(oc.row.p2_status == "relative_kkt");
  CHECK(std::abs(oc.row.p2_f - (-1.0)) <= 1e-3);
  CHECK(oc.row.wall_s >= 0.0);
  CHECK(oc.row.audit_ok);
  CHECK(oc.audit_p1.ok());
  CHECK(oc.audit_p2.ok());

  // corridor width: never below the handoff residual or the hard floor
  CHECK(oc.eps_feas_used >= 1e-8);
  CHECK(oc.eps_feas_used >= oc.p1.norm_c * (1 - 1e-12));
}

TEST_CASE("benchmark csv shape") {
  RunConfig cfg;
  cfg.audit = true;
  const auto rows =
      run_benchmark({"MARATOS", "HS6"}, {SolveMode::full, SolveMode::v_only},
                    cfg, nullptr);
  REQUIRE(rows.size() == 4);

  const std::string csv = benchmark_csv(rows);
  std::istringstream is(csv);
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "problem,n,m,mode,p1_status,p1_viter,p1_fiter,p1_f,p1_norm_c,p1_dual,"
        "p2_status,p2_accepted,p2_rejected,p2_f,wall_s,audit_ok");
  int data_lines = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) ++data_lines;
  CHECK(data_lines == 4);

  const std::string text = benchmark_text(rows);
  CHECK(text.find("MARATOS") != std::string::npos);
  CHECK(text.find("v_only") != std::string::npos);
}

TEST_CASE("trace serialization") {
  RunConfig cfg;
  cfg.problem = "HS6";
  cfg.audit = true;
  const SolveOutcome oc = run_solver(corpus_lookup(cfg.problem), cfg);
  REQUIRE(oc.p1.status == Phase1Result::Status::near_feasible);

  SUBCASE("csv layout") {
    std::ostringstream os;
    write_trace_csv(os, oc);
    const std::string text = os.str();
    CHECK(text.find("# phase 1: HS6") != std::string::npos);
    CHECK(text.find("k,kind,f,v,norm_c,norm_gv,") != std::string::npos);
    CHECK(text.find("# phase 2:") != std::string::npos);
    CHECK(text.find("k,accepted,phi,norm_r,t,") != std::string::npos);
    CHECK(text.find("terminated") != std::string::npos);
  }
  SUBCASE("json parses back with both phases") {
    std::ostringstream os;
    write_trace_json(os, oc);
    const auto doc = nlohmann::json::parse(os.str());
    CHECK(doc.contains("phase1"));
    CHECK(doc.contains("phase2"));
    CHECK(doc["phase1"]["trace"].is_array());
    CHECK(!doc["phase1"]["trace"].empty());
    CHECK(doc["phase1"]["status"].get<std::string>() == "near_feasible");
    CHECK(doc["phase2"]["status"].get<std::string>() == "relative_kkt");
  }
}

TEST_CASE("deterministic reruns produce identical traces") {
  RunConfig cfg;
  cfg.problem = "HS7";
  auto render = [&] {
    const SolveOutcome oc = run_solver(corpus_lookup(cfg.problem), cfg);
    std::ostringstream os;
    write_trace_csv(os, oc);
    return os.str();
  };
  const std::string first = render();
  const std::string second = render();
  CHECK(first == second);
  CHECK(first.find("# phase 1: HS7") != std::string::npos);
}
