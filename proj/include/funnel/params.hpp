#pragma once

#include <map>
#include <string>

namespace funnel {

// All solver constants with their legal ranges; validate() throws
// std::invalid_argument naming the offending field and its interval.
struct SolverParams {
  // in (0,1)
  double kappa_n = 0.9;
  double kappa_vm = 1e-12;
  double kappa_ntn = 1e-12;
  double kappa_fm = 1e-12;
  double kappa_st = 1e-12;
  double kappa_ntt = 1.0 - 2e-12;
  double kappa_v1 = 0.9;
  double kappa_v2 = 0.9;
  double kappa_rho_accept = 1e-8;   // step acceptance threshold
  double kappa_rho_funnel = 1e-12;  // cubic funnel-margin constant
  double gamma_c_F = 0.5;           // objective-radius contraction factor
  double gamma_c_V = 1e-2;          // normal-radius contraction factor
  // in (0, inf)
  double kappa_p = 1e-6;
  double kappa_ht = 1e20;
  double kappa_hs = 1e20;
  double epsilon = 1e-6;  // stationarity threshold for theory-mode phase 1
  double sigma_min = 1e-12;
  // in (1, inf)
  double kappa_delta = 1e2;
  double gamma_e = 2.0;
  double gamma_lambda = 2.0;
  // in [sigma_min, inf)
  double sigma_max = 1e20;
  // initial radii, > 0 with delta_v0 <= delta_vmax0
  double delta_v0 = 1.0;
  double delta_vmax0 = 1e8;
  double delta_f0 = 1.0;
  // iteration budget for phase 1
  int max_iter = 5000;
  // practical termination scales (infinity norms, relative to the start)
  double feas_tol = 1e-6;
  double dual_tol = 1e-6;
  double infeas_ratio_tol = 1e-3;

  void validate() const;
};

// Flat key=value serialization; emit/parse round-trips bit-exactly.
std::string emit_params(const SolverParams& p);
SolverParams params_from_kv(const std::map<std::string, std::string>& kv);
SolverParams parse_params_text(const std::string& text);

}  // namespace funnel
