#include "funnel/driver.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace funnel {

namespace {

const char* mode_name(SolveMode m) {
  return m == SolveMode::full ? "full" : "v_only";
}

// shortest round-trip decimal; infinities come out as "inf"/"-inf"
std::string fmt(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fmt(std::int64_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

double dual_residual(const NlpProblem& p, const Vec& x) {
  try {
    const EvalPoint e = evaluate(p, x);
    if (e.c.size() == 0) return e.g.norm();
    const Vec y = least_squares_multipliers(e);
    return (e.g + e.J.transpose() * y).norm();
  } catch (const EvalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double objective_at(const NlpProblem& p, const Vec& x) {
  try {
    return evaluate(p, x).f;
  } catch (const EvalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SolveOutcome run_solver(const NlpProblem& p, const RunConfig& cfg) {
  SolveOutcome oc;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    const std::chrono::duration<double> el =
        std::chrono::steady_clock::now() - t0;
    return el.count();
  };

  SolverParams prm = cfg.params;
  prm.max_iter = cfg.max_iter_p1;
  if (cfg.theory) prm.epsilon = cfg.eps_feas * cfg.eps_inf;

  Phase1Options p1o;
  p1o.mode = cfg.mode;
  p1o.theory = cfg.theory;
  p1o.eps_feas = cfg.eps_feas;
  p1o.time_limit = cfg.time_limit;
  oc.p1 = run_phase1(p, prm, p1o);

  auto& row = oc.row;
  row.problem = p.name;
  row.n = p.n_vars;
  row.m = p.n_cons;
  row.mode = cfg.mode;
  row.p1_status = phase1_status_name(oc.p1.status);
  row.p1_viter = oc.p1.n_viter;
  row.p1_fiter = oc.p1.n_fiter;
  row.p1_f = oc.p1.f;
  row.p1_norm_c = oc.p1.norm_c;
  row.p1_dual = dual_residual(p, oc.p1.x);
  row.p2_status = "-";
  if (cfg.audit) oc.audit_p1 = audit_phase1(oc.p1.trace, prm);

  if (oc.p1.status == Phase1Result::Status::near_feasible) {
    if (cfg.theory) {
      oc.eps_feas_used = cfg.eps_feas;
    } else {
      double c0_inf = 1.0;
      try {
        c0_inf = std::max(
            evaluate(p, p.x0).c.lpNorm<Eigen::Infinity>(), 1.0);
      } catch (const EvalError&) {
      }
      oc.eps_feas_used = std::max(
          {oc.p1.norm_c, prm.feas_tol * c0_inf, 1e-8});
    }

    Phase2Options p2o;
    p2o.eps = cfg.theory
                  ? std::min(cfg.eps_opt, std::cbrt(oc.eps_feas_used))
                  : cfg.eps_opt;
    p2o.eps_feas = oc.eps_feas_used;
    p2o.max_iter = cfg.max_iter_p2;
    p2o.practical_dual_tol = cfg.theory ? 0.0 : prm.dual_tol;
    if (cfg.time_limit > 0)
      p2o.time_limit = std::max(cfg.time_limit - elapsed(), 1e-3);

    try {
      oc.p2 = run_phase2(p, oc.p1.x, prm, p2o);
      row.p2_status = phase2_status_name(oc.p2->status);
      row.p2_accepted = oc.p2->n_accepted;
      row.p2_rejected = oc.p2->n_rejected;
      row.p2_f = objective_at(p, oc.p2->x);
      if (cfg.audit)
        oc.audit_p2 = audit_phase2(*oc.p2, prm, oc.eps_feas_used);
    } catch (const std::invalid_argument& err) {
      row.p2_status = "error";
      oc.audit_p2.violations.push_back(err.what());
    }
  }

  row.wall_s = elapsed();
  row.audit_ok = !cfg.audit || (oc.audit_p1.ok() && oc.audit_p2.ok());
  return oc;
}

std::vector<BenchmarkRow> run_benchmark(const std::vector<std::string>& names,
                                        const std::vector<SolveMode>& modes,
                                        const RunConfig& cfg,
                                        std::ostream* progress) {
  std::vector<BenchmarkRow> rows;
  rows.reserve(names.size() * modes.size());
  for (const auto& name : names) {
    const NlpProblem p = corpus_lookup(name);
    for (SolveMode mode : modes) {
      RunConfig c = cfg;
      c.problem = name;
      c.mode = mode;
      const SolveOutcome oc = run_solver(p, c);
      rows.push_back(oc.row);
      if (progress) {
        const auto& r = rows.back();
        *progress << r.problem << " [" << mode_name(r.mode)
                  << "] p1=" << r.p1_status << " p2=" << r.p2_status
                  << " f=" << fmt(r.p2_status == "-" ? r.p1_f : r.p2_f)
                  << " wall=" << std::fixed << std::setprecision(2) << r.wall_s
                  << "s" << (r.audit_ok ? "" : "  AUDIT-FAIL") << "\n";
        progress->flush();
      }
    }
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "problem,n,m,mode,p1_status,p1_viter,p1_fiter,p1_f,p1_norm_c,"
        "p1_dual,p2_status,p2_accepted,p2_rejected,p2_f,wall_s,audit_ok\n";
  for (const auto& r : rows) {
    os << r.problem << ',' << r.n << ',' << r.m << ',' << mode_name(r.mode)
       << ',' << r.p1_status << ',' << r.p1_viter << ',' << r.p1_fiter << ','
       << fmt(r.p1_f) << ',' << fmt(r.p1_norm_c) << ',' << fmt(r.p1_dual)
       << ',' << r.p2_status << ',' << r.p2_accepted << ',' << r.p2_rejected
       << ',' << fmt(r.p2_f) << ',' << fmt(r.wall_s) << ','
       << (r.audit_ok ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string benchmark_text(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "problem" << std::right << std::setw(3)
     << "n" << std::setw(3) << "m" << "  " << std::left << std::setw(7)
     << "mode" << std::setw(21) << "p1_status" << std::right << std::setw(6)
     << "#V" << std::setw(6) << "#F" << std::setw(14) << "||c||" << "  "
     << std::left << std::setw(25) << "p2_status" << std::right
     << std::setw(10) << "acc" << std::setw(8) << "rej" << std::setw(16)
     << "f" << std::setw(9) << "wall" << "  audit\n";
  for (const auto& r : rows) {
    std::ostringstream f;
    f.precision(8);
    f << (r.p2_status == "-" ? r.p1_f : r.p2_f);
    std::ostringstream nc;
    nc.precision(3);
    nc << std::scientific << r.p1_norm_c;
    os << std::left << std::setw(10) << r.problem << std::right << std::setw(3)
       << r.n << std::setw(3) << r.m << "  " << std::left << std::setw(7)
       << mode_name(r.mode) << std::setw(21) << r.p1_status << std::right
       << std::setw(6) << r.p1_viter << std::setw(6) << r.p1_fiter
       << std::setw(14) << nc.str() << "  " << std::left << std::setw(25)
       << r.p2_status << std::right << std::setw(10) << r.p2_accepted
       << std::setw(8) << r.p2_rejected << std::setw(16) << f.str()
       << std::setw(8) << std::fixed << std::setprecision(2) << r.wall_s
       << "s" << "  " << (r.audit_ok ? "ok" : "FAIL") << "\n";
  }
  return os.str();
}

void write_trace_csv(std::ostream& os, const SolveOutcome& oc) {
  os << "# phase 1: " << oc.row.problem << " [" << mode_name(oc.row.mode)
     << "] status=" << oc.row.p1_status << "\n";
  os << "k,kind,f,v,norm_c,norm_gv,norm_n,norm_t,norm_s,lambda_v,lambda_f,"
        "delta_v,delta_f,delta_vmax,vmax,sigma_v,rho_f,rho_v\n";
  for (const auto& r : oc.p1.trace) {
    os << r.k << ',' << iter_kind_name(r.kind) << ',' << fmt(r.f) << ','
       << fmt(r.v) << ',' << fmt(r.norm_c) << ',' << fmt(r.norm_gv) << ','
       << fmt(r.norm_n) << ',' << fmt(r.norm_t) << ',' << fmt(r.norm_s) << ','
       << fmt(r.lambda_v) << ',' << fmt(r.lambda_f) << ',' << fmt(r.delta_v)
       << ',' << fmt(r.delta_f) << ',' << fmt(r.delta_vmax) << ','
       << fmt(r.vmax) << ',' << fmt(r.sigma_v) << ',' << fmt(r.rho_f) << ','
       << fmt(r.rho_v) << '\n';
  }
  if (!oc.p2) return;
  os << "# phase 2: status=" << oc.row.p2_status
     << " dropped_rows=" << oc.p2->dropped_rows << "\n";
  os << "k,accepted,phi,norm_r,t,norm_grad_phi,delta,lambda,rho\n";
  for (const auto& r : oc.p2->trace) {
    os << r.k << ',' << (r.accepted ? 1 : 0) << ',' << fmt(r.phi) << ','
       << fmt(r.norm_r) << ',' << fmt(r.t) << ',' << fmt(r.norm_grad_phi)
       << ',' << fmt(r.delta) << ',' << fmt(r.lambda) << ',' << fmt(r.rho)
       << '\n';
  }
}

void write_trace_json(std::ostream& os, const SolveOutcome& oc) {
  nlohmann::json doc;
  doc["problem"] = oc.row.problem;
  doc["mode"] = mode_name(oc.row.mode);
  doc["eps_feas"] = oc.eps_feas_used;

  nlohmann::json p1;
  p1["status"] = oc.row.p1_status;
  p1["f"] = oc.p1.f;
  p1["norm_c"] = oc.p1.norm_c;
  p1["norm_gv"] = oc.p1.norm_gv;
  p1["x"] = std::vector<double>(oc.p1.x.data(), oc.p1.x.data() + oc.p1.x.size());
  auto rows = nlohmann::json::array();
  for (const auto& r : oc.p1.trace) {
    rows.push_back({{"k", r.k},
                    {"kind", iter_kind_name(r.kind)},
                    {"f", r.f},
                    {"v", r.v},
                    {"norm_c", r.norm_c},
                    {"norm_gv", r.norm_gv},
                    {"norm_n", r.norm_n},
                    {"norm_t", r.norm_t},
                    {"norm_s", r.norm_s},
                    {"lambda_v", r.lambda_v},
                    {"lambda_f", r.lambda_f},
                    {"delta_v", r.delta_v},
                    {"delta_f", r.delta_f},
                    {"delta_vmax", r.delta_vmax},
                    {"vmax", r.vmax},
                    {"sigma_v", r.sigma_v},
                    {"rho_f", std::isfinite(r.rho_f) ? r.rho_f : 1e308},
                    {"rho_v", std::isfinite(r.rho_v) ? r.rho_v : 1e308}});
  }
  p1["trace"] = std::move(rows);
  doc["phase1"] = std::move(p1);

  if (oc.p2) {
    nlohmann::json p2;
    p2["status"] = oc.row.p2_status;
    p2["t"] = oc.p2->t;
    p2["final_rel_kkt"] = oc.p2->final_rel_kkt;
    p2["n_accepted"] = oc.p2->n_accepted;
    p2["n_rejected"] = oc.p2->n_rejected;
    p2["dropped_rows"] = oc.p2->dropped_rows;
    p2["x"] = std::vector<double>(oc.p2->x.data(),
                                  oc.p2->x.data() + oc.p2->x.size());
    p2["y"] = std::vector<double>(oc.p2->y.data(),
                                  oc.p2->y.data() + oc.p2->y.size());
    auto prow = nlohmann::json::array();
    for (const auto& r : oc.p2->trace) {
      prow.push_back({{"k", r.k},
                      {"accepted", r.accepted},
                      {"phi", r.phi},
                      {"norm_r", r.norm_r},
                      {"t", r.t},
                      {"norm_grad_phi", r.norm_grad_phi},
                      {"delta", r.delta},
                      {"lambda", r.lambda},
                      {"rho", std::isfinite(r.rho) ? r.rho : 1e308}});
    }
    p2["trace"] = std::move(prow);
    doc["phase2"] = std::move(p2);
  } else {
    doc["phase2"] = nullptr;
  }
  os << doc.dump(1) << "\n";
}

std::vector<std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::string> names;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos &&
      (text[first] == '[' || text[first] == '{')) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
      throw std::runtime_error(std::string("manifest: ") + err.what());
    }
    const nlohmann::json* arr = &doc;
    if (doc.is_object()) {
      if (!doc.contains("problems"))
        throw std::runtime_error("manifest: object without \"problems\"");
      arr = &doc["problems"];
    }
    if (!arr->is_array())
      throw std::runtime_error("manifest: expected an array of names");
    for (const auto& item : *arr) {
      if (item.is_string())
        names.push_back(item.get<std::string>());
      else if (item.is_object() && item.contains("name"))
        names.push_back(item["name"].get<std::string>());
      else
        throw std::runtime_error("manifest: entries must be names");
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const auto a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      const auto b = line.find_last_not_of(" \t\r");
      line = line.substr(a, b - a + 1);
      if (line.empty() || line[0] == '#') continue;
      names.push_back(line);
    }
  }
  for (const auto& name : names) corpus_lookup(name);  // must resolve
  return names;
}

int exit_code_for(const SolveOutcome& oc) {
  if (oc.p1.status == Phase1Result::Status::infeasible_stationary) return 1;
  if (oc.p1.status != Phase1Result::Status::near_feasible) return 2;
  if (!oc.p2) return 2;
  switch (oc.p2->status) {
    case Phase2Result::Status::relative_kkt: return 0;
    case Phase2Result::Status::infeasibility_stationary: return 1;
    default: return 2;
  }
}

}  // namespace funnel
