#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "funnel/audit.hpp"
#include "funnel/corpus.hpp"
#include "funnel/params.hpp"
#include "funnel/phase1.hpp"
#include "funnel/phase2.hpp"

namespace funnel {

struct RunConfig {
  std::string problem;
  SolveMode mode = SolveMode::full;
  SolverParams params;
  bool theory = false;
  double eps_feas = 1e-4;  // theory-mode feasibility tolerance
  double eps_inf = 1e-2;   // theory-mode dual tolerance (eps = eps_feas*eps_inf)
  double eps_opt = 1e-6;   // optimality-phase relative threshold
  int max_iter_p1 = 5000;
  std::int64_t max_iter_p2 = 2'000'000;
  double time_limit = 0;  // per-problem seconds; 0 disables
  bool audit = false;
  bool json_trace = false;
  std::string trace_path;
};

struct BenchmarkRow {
  std::string problem;
  int n = 0, m = 0;
  SolveMode mode = SolveMode::full;
  std::string p1_status;
  int p1_viter = 0, p1_fiter = 0;
  double p1_f = 0, p1_norm_c = 0, p1_dual = 0;  // dual = ||g + J'y|| (LS y)
  std::string p2_status;
  std::int64_t p2_accepted = 0, p2_rejected = 0;
  double p2_f = 0;
  double wall_s = 0;
  bool audit_ok = true;
};

struct SolveOutcome {
  Phase1Result p1;
  std::optional<Phase2Result> p2;
  double eps_feas_used = 0;
  BenchmarkRow row;
  AuditReport audit_p1, audit_p2;
};

// Feasibility phase, then (unless an infeasible stationary point was
// declared) the optimality phase from the phase-1 iterate. The optimality
// corridor width is never tighter than the feasibility tolerance the first
// phase was asked to achieve: eps_feas_used =
// max(||c|| at handoff, feas_tol*max(||c0||_inf, 1), 1e-8) in practical
// mode and the configured eps_feas in theory mode.
SolveOutcome run_solver(const NlpProblem& p, const RunConfig& cfg);

std::vector<BenchmarkRow> run_benchmark(const std::vector<std::string>& names,
                                        const std::vector<SolveMode>& modes,
                                        const RunConfig& cfg,
                                        std::ostream* progress = nullptr);

// Fixed-header CSV (documented in the README) and an aligned text table.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);
std::string benchmark_text(const std::vector<BenchmarkRow>& rows);

void write_trace_csv(std::ostream& os, const SolveOutcome& oc);
void write_trace_json(std::ostream& os, const SolveOutcome& oc);

// Manifest: JSON array of names, or {"problems": [...]}, or newline-
// separated text. Names must resolve in the corpus.
std::vector<std::string> read_manifest(const std::string& path);

// 0 = solved, 1 = infeasible stationary declaration, 2 = limits/errors.
int exit_code_for(const SolveOutcome& oc);

}  // namespace funnel
