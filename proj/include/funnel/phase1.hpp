#pragma once

#include <string>
#include <vector>

#include "funnel/params.hpp"
#include "funnel/problem.hpp"
#include "funnel/subproblems.hpp"

namespace funnel {

enum class IterKind {
  F_success,
  F_contract,
  V_success,
  V_contract,
  V_expand,
  terminated,  // sentinel row carrying the final state
  none,        // "no previous iteration" marker
};

const char* iter_kind_name(IterKind k);

// One audit/trace row. Step-dependent fields are zero on the sentinel row.
struct IterationRecord {
  int k = 0;
  IterKind kind = IterKind::none;
  double f = 0, v = 0, norm_c = 0, norm_gv = 0;
  double norm_n = 0, norm_t = 0, norm_s = 0;
  double lambda_v = 0, lambda_f = 0;
  double delta_v = 0, delta_f = 0, delta_vmax = 0;
  double vmax = 0, sigma_v = 0;
  double rho_f = 0, rho_v = 0;
  // extras consumed by the auditor
  bool t_nonzero = false;
  bool retention_ok = true;
  double norm_Hv = 0;       // operator norm proxy (spectral norm)
  double mv_decrease = 0;   // v - m_v(s)
  double kkt_n = 0;         // normal-step stationarity residual (relative)
  double kkt_t = 0;         // tangential-step stationarity residual (relative)
};

// Steps and duals of one iteration plus the model values both subroutines
// consume. s = n + t always.
struct StepBundle {
  Vec n, t, s;
  double lambda_v = 0, lambda_f = 0;
  Vec yf;
  bool has_yf = false;
  Vec gp;
  double mv0 = 0, mvn = 0, mvs = 0;
  double mf0 = 0, mfn = 0, mfs = 0;
  double kkt_n = 0, kkt_t = 0;
};

// Mutable solver state between iterations.
struct FunnelState {
  int k = 0;
  EvalPoint e;
  InfeasModel im;
  Mat Hk;
  double vmax = 0;
  double delta_v = 0, delta_f = 0, delta_vmax = 0;
  double sigma_v = 0;
  double prev_rho_v = 0;
  IterKind prev_kind = IterKind::none;
  // the last normal iteration at the current point was an expansion, so the
  // ratio test is deemed satisfied at the expanded radius (see v_iteration)
  bool after_expansion = false;
};

struct Phase1Result {
  enum class Status { near_feasible, infeasible_stationary, iter_limit, eval_error };
  Status status = Status::iter_limit;
  Vec x;
  int n_viter = 0, n_fiter = 0;
  std::vector<IterationRecord> trace;
  double f = 0, norm_c = 0, norm_gv = 0;
  std::string error;
};

const char* phase1_status_name(Phase1Result::Status s);

enum class SolveMode { full, v_only };

// --- building blocks (unit-tested individually) ---

// Normal step from the trust-region solve at radius delta_v; tangential step
// gated by ||n|| <= kappa_n*delta_s and ||gp|| >= kappa_p*||gv||, then
// discarded again unless the retention inequalities hold. delta_s =
// min(kappa_delta*delta_v, delta_f). In v_only mode the gate is never
// evaluated and t = 0.
StepBundle compute_steps(const EvalPoint& e, const InfeasModel& im,
                         const Mat& Hk, const SolverParams& prm,
                         double delta_v, double delta_f, SolveMode mode);

// (a) m_v(0)-m_v(n+t) >= kappa_vm*(m_v(0)-m_v(n));
// (b) ||n+t|| >= kappa_ntn*||n||; (c) ||Hv t|| <= kappa_ht*||n+t||^2.
bool tangential_retention_ok(const StepBundle& b, const InfeasModel& im,
                             const SolverParams& prm);

// The six objective-iteration conditions; hess_err = ||(Hk - hess_f) s||
// (identically zero when Hk is the exact objective Hessian).
bool f_conditions_hold(const StepBundle& b, double vmax, double v_trial,
                       double sigma_v, double hess_err,
                       const SolverParams& prm);

// decrease per unit step cubed
double rho_f(double f_k, double f_trial, const Vec& s);
double rho_v(double v_k, double v_trial, const Vec& s);

// accepted objective step: min{max{kv1*vmax, vmax - krho*||s||^3},
//                              v_next + kv2*(vmax - v_next)}
double update_vmax_f(double vmax, double v_next, const Vec& s,
                     const SolverParams& prm);

// accepted normal step: min{max{kv1*vmax, v_next + kv2*(v_k - v_next)},
//                           v_next + kv2*(vmax - v_next)}
double update_vmax_v(double vmax, double v_k, double v_next,
                     const SolverParams& prm);

// sigma is frozen across objective iterations and raised to lambda_v/||n||
// after a rejected normal step.
double compute_sigma(const Vec& n, double lambda_v, double sigma_prev,
                     double rho_v_prev, IterKind prev_kind,
                     const SolverParams& prm);

// Contraction rules returning the next radius.
double f_contract(const EvalPoint& e, const Mat& Hk, const StepBundle& b,
                  const SolverParams& prm);
double v_contract(const InfeasModel& im, const StepBundle& b,
                  const SolverParams& prm);

// One objective iteration: accept (move, shrink funnel, grow delta_f) or
// contract delta_f. Leaves delta_v, delta_vmax, sigma_v untouched.
IterKind f_iteration(FunnelState& st, const StepBundle& b, double rho,
                     double v_trial, const EvalPoint& e_trial,
                     const SolverParams& prm);

// One normal iteration: accept / contract / expand. Leaves delta_f untouched.
IterKind v_iteration(FunnelState& st, const StepBundle& b, double rho,
                     double v_trial, const EvalPoint& e_trial,
                     const SolverParams& prm);

struct Phase1Options {
  SolveMode mode = SolveMode::full;
  HessMode hess = HessMode::exact_f;
  bool theory = false;    // terminate on ||gv|| <= epsilon instead of the
                          // scaled practical tests
  double eps_feas = 1e-4; // theory-mode feasibility classification threshold
  double time_limit = 0;  // seconds; 0 disables
};

Phase1Result run_phase1(const NlpProblem& p, const SolverParams& prm,
                        const Phase1Options& opt);

}  // namespace funnel
