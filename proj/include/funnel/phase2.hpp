#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funnel/params.hpp"
#include "funnel/phase1.hpp"
#include "funnel/problem.hpp"

namespace funnel {

// One optimality-phase row.
struct Phase2Row {
  std::int64_t k = 0;
  bool accepted = false;
  double phi = 0, norm_r = 0, t = 0, norm_grad_phi = 0;
  double delta = 0, lambda = 0, rho = 0;
};

// Corridor bookkeeping checked incrementally so unbounded runs stay
// auditable even when the stored trace is capped.
struct Phase2AuditCounters {
  std::int64_t rows = 0;
  std::int64_t bad_residual_norm = 0;   // accepted iterate with ||r|| off eps_feas
  std::int64_t bad_feasibility = 0;     // ||c|| > eps_feas + 1e-10
  std::int64_t bad_target_gap = 0;      // f - t outside [0, eps_feas + 1e-10]
  std::int64_t target_increase = 0;     // t went up
  std::int64_t bad_accept_ratio = 0;    // accepted with rho < kappa_rho_accept
  std::int64_t worst_reject_streak = 0; // longest run of consecutive rejections
};

struct Phase2Result {
  enum class Status { relative_kkt, infeasibility_stationary, iter_limit, eval_error };
  Status status = Status::iter_limit;
  Vec x;
  double t = 0;
  Vec y;                 // multiplier estimate backing the certificate
  double final_rel_kkt = 0;  // ||g + J'y|| / ||(y,1)|| at the final point
  std::int64_t n_accepted = 0, n_rejected = 0;
  std::vector<Phase2Row> trace;  // capped at trace_cap rows
  std::int64_t dropped_rows = 0;
  Phase2AuditCounters counters;
  std::string error;
};

const char* phase2_status_name(Phase2Result::Status s);

// r = (c; f - t).
Vec residual(const EvalPoint& e, double t);

// Phi = 0.5*||r||^2 with gradient J'c + (f-t)g and Hessian
// J'J + sum c_i Hc_i + g g' + (f-t) Hf.
void phi_model(const EvalPoint& e, double t, const Mat& hess_f,
               const std::vector<Mat>& hess_ci, double& value, Vec& grad,
               Mat& hess);

// t0 = f0 - sqrt(eps_feas^2 - ||c0||^2); throws std::invalid_argument when
// ||c0|| > eps_feas (handoff contract).
double initial_target(double f0, double norm_c0, double eps_feas);

// t+ = f_next - sqrt(||r_prev||^2 - ||r_next||^2 + (f_next - t)^2), the value
// restoring ||r(x_next, t+)|| = ||r_prev||. Negative rounding noise in the
// radicand is clamped to zero.
double update_target(double r_prev_norm, double r_next_norm, double f_next,
                     double t);

struct Phase2Options {
  double eps = 1e-6;        // relative stationarity threshold
  double eps_feas = 1e-4;   // residual-norm corridor
  std::int64_t max_iter = 2'000'000;
  double time_limit = 0;    // seconds; 0 disables
  std::int64_t trace_cap = 1 << 20;
  double practical_dual_tol = 1e-6;  // 0 disables the supplementary test
};

// Requires ||c(x_start)|| <= eps_feas.
Phase2Result run_phase2(const NlpProblem& p, const Vec& x_start,
                        const SolverParams& prm, const Phase2Options& opt);

}  // namespace funnel
