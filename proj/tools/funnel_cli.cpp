// Command-line front end: solve one problem, benchmark a manifest, or run
// the derivative checker.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "funnel/driver.hpp"

using namespace funnel;

namespace {

SolveMode mode_from(const std::string& s) {
  if (s == "full") return SolveMode::full;
  if (s == "v-only" || s == "v_only") return SolveMode::v_only;
  throw CLI::ValidationError("--mode", "expected full or v-only");
}

SolverParams load_params(const std::string& config_path) {
  if (config_path.empty()) return SolverParams{};
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config " + config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_params_text(buf.str());
}

void print_outcome(const SolveOutcome& oc, bool audit) {
  const auto& r = oc.row;
  std::cout << r.problem << " (n=" << r.n << ", m=" << r.m << ", "
            << (r.mode == SolveMode::full ? "full" : "v_only") << ")\n";
  std::cout << "  phase 1: " << r.p1_status << "  v-iter=" << r.p1_viter
            << " f-iter=" << r.p1_fiter << "  f=" << r.p1_f
            << "  ||c||=" << r.p1_norm_c << "  dual=" << r.p1_dual << "\n";
  std::cout << "  phase 2: " << r.p2_status;
  if (oc.p2) {
    std::cout << "  accepted=" << r.p2_accepted
              << " rejected=" << r.p2_rejected << "  f=" << r.p2_f
              << "  rel-kkt=" << oc.p2->final_rel_kkt
              << "  corridor=" << oc.eps_feas_used;
  }
  std::cout << "\n";
  const Vec& x = oc.p2 ? oc.p2->x : oc.p1.x;
  std::cout << "  x = [";
  for (int i = 0; i < x.size(); ++i)
    std::cout << (i ? ", " : "") << x[i];
  std::cout << "]\n";
  if (audit) {
    std::cout << "  audit phase 1: " << oc.audit_p1.summary() << "\n";
    if (oc.p2) std::cout << "  audit phase 2: " << oc.audit_p2.summary() << "\n";
  }
  std::cout << "  wall: " << r.wall_s << "s\n";
}

int cmd_solve(const std::string& problem, const std::string& mode,
              const std::string& config, const std::string& trace,
              bool json, bool audit, bool theory, double eps_feas,
              double eps_inf, double eps_opt, int max_iter,
              std::int64_t max_iter_p2, double time_limit) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.mode = mode_from(mode);
  cfg.params = load_params(config);
  cfg.theory = theory;
  cfg.eps_feas = eps_feas;
  cfg.eps_inf = eps_inf;
  cfg.eps_opt = eps_opt;
  cfg.max_iter_p1 = max_iter;
  cfg.max_iter_p2 = max_iter_p2;
  cfg.time_limit = time_limit;
  cfg.audit = audit;
  cfg.json_trace = json;
  cfg.trace_path = trace;

  const NlpProblem p = corpus_lookup(problem);
  const SolveOutcome oc = run_solver(p, cfg);
  print_outcome(oc, audit);

  if (!trace.empty()) {
    std::ofstream out(trace);
    if (!out) throw std::runtime_error("cannot open trace file " + trace);
    if (json)
      write_trace_json(out, oc);
    else
      write_trace_csv(out, oc);
    std::cout << "  trace written to " << trace << "\n";
  }

  if (audit && !(oc.audit_p1.ok() && oc.audit_p2.ok())) return 2;
  return exit_code_for(oc);
}

int cmd_bench(const std::string& manifest, const std::string& modes_arg,
              const std::string& out_dir, double time_limit,
              std::int64_t max_iter_p2) {
  const auto names = read_manifest(manifest);

  std::vector<SolveMode> modes;
  std::stringstream ms(modes_arg);
  std::string tok;
  while (std::getline(ms, tok, ',')) {
    if (!tok.empty()) modes.push_back(mode_from(tok));
  }
  if (modes.empty()) modes.push_back(SolveMode::full);

  RunConfig cfg;
  cfg.audit = true;
  cfg.time_limit = time_limit;
  cfg.max_iter_p2 = max_iter_p2;

  const auto rows = run_benchmark(names, modes, cfg, &std::cerr);

  if (out_dir.empty()) {
    std::cout << benchmark_text(rows);
  } else {
    std::filesystem::create_directories(out_dir);
    const auto csv_path = std::filesystem::path(out_dir) / "bench.csv";
    const auto txt_path = std::filesystem::path(out_dir) / "bench.txt";
    std::ofstream(csv_path) << benchmark_csv(rows);
    std::ofstream(txt_path) << benchmark_text(rows);
    std::cout << "wrote " << csv_path.string() << " and " << txt_path.string()
              << "\n";
  }

  for (const auto& r : rows)
    if (!r.audit_ok) return 2;
  return 0;
}

int cmd_check_derivs(const std::string& problem, bool all) {
  std::vector<std::string> names;
  if (all)
    names = corpus_names();
  else
    names.push_back(problem);

  bool ok = true;
  for (const auto& name : names) {
    const NlpProblem p = corpus_lookup(name);
    const DerivCheckReport rep = check_derivatives(p, p.x0);
    double worst_ci = 0;
    for (double e : rep.err_hess_ci) worst_ci = std::max(worst_ci, e);
    std::cout << (rep.pass ? "PASS" : "FAIL") << "  " << name
              << "  err_g=" << rep.err_g << " err_J=" << rep.err_J
              << " err_hess_f=" << rep.err_hess_f
              << " err_hess_c=" << worst_ci << " (tol " << rep.tol << ")\n";
    ok = ok && rep.pass;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-phase trust-funnel solver for equality-constrained "
               "nonlinear programs"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run both phases on one problem");
  std::string problem, mode = "full", config, trace;
  bool json = false, audit = false, theory = false;
  double eps_feas = 1e-4, eps_inf = 1e-2, eps_opt = 1e-6, time_limit = 0;
  int max_iter = 5000;
  std::int64_t max_iter_p2 = 2'000'000;
  solve->add_option("--problem", problem, "corpus problem name")->required();
  solve->add_option("--mode", mode, "full or v-only")
      ->check(CLI::IsMember({"full", "v-only", "v_only"}));
  solve->add_option("--config", config, "key=value parameter file");
  solve->add_option("--trace", trace, "write the iteration trace here");
  solve->add_flag("--json", json, "trace in JSON instead of CSV");
  solve->add_flag("--audit", audit, "run the invariant audit (exit 2 on fail)");
  solve->add_flag("--theory", theory, "theory-mode termination tests");
  solve->add_option("--eps-feas", eps_feas, "feasibility tolerance");
  solve->add_option("--eps-inf", eps_inf, "theory-mode dual tolerance");
  solve->add_option("--eps-opt", eps_opt, "optimality-phase threshold");
  solve->add_option("--max-iter", max_iter, "phase-1 iteration cap");
  solve->add_option("--max-iter-p2", max_iter_p2, "phase-2 iteration cap");
  solve->add_option("--time-limit", time_limit, "seconds per problem");

  // bench
  auto* bench = app.add_subcommand("bench", "run a manifest of problems");
  std::string manifest, modes_arg = "full,v-only", out_dir;
  double bench_time_limit = 0;
  std::int64_t bench_max_iter_p2 = 2'000'000;
  bench->add_option("--manifest", manifest, "problem list (json or text)")
      ->required();
  bench->add_option("--modes", modes_arg, "comma-separated: full,v-only");
  bench->add_option("--out", out_dir, "directory for bench.csv/bench.txt");
  bench->add_option("--time-limit", bench_time_limit, "seconds per problem");
  bench->add_option("--max-iter-p2", bench_max_iter_p2,
                    "phase-2 iteration cap");

  // check-derivs
  auto* chk = app.add_subcommand("check-derivs",
                                 "finite-difference derivative verification");
  std::string chk_problem;
  bool chk_all = false;
  chk->add_option("--problem", chk_problem, "corpus problem name");
  chk->add_flag("--all", chk_all, "check the whole corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(problem, mode, config, trace, json, audit, theory,
                       eps_feas, eps_inf, eps_opt, max_iter, max_iter_p2,
                       time_limit);
    if (bench->parsed())
      return cmd_bench(manifest, modes_arg, out_dir, bench_time_limit,
                       bench_max_iter_p2);
    if (chk->parsed()) {
      if (!chk_all && chk_problem.empty()) {
        std::cerr << "check-derivs: pass --problem NAME or --all\n";
        return 2;
      }
      return cmd_check_derivs(chk_problem, chk_all);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
