#include "funnel/audit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace funnel {

namespace {

bool is_success(IterKind k) {
  return k == IterKind::F_success || k == IterKind::V_success;
}
bool is_f(IterKind k) {
  return k == IterKind::F_success || k == IterKind::F_contract;
}
bool is_v(IterKind k) {
  return k == IterKind::V_success || k == IterKind::V_contract ||
         k == IterKind::V_expand;
}

double cube(double x) { return x * x * x; }

class Checker {
 public:
  explicit Checker(AuditReport& rep) : rep_(rep) {}
  void check(bool ok, int row, const std::string& what) {
    ++rep_.checks_run;
    if (ok) return;
    std::ostringstream os;
    os << "row " << row << ": " << what;
    rep_.violations.push_back(os.str());
  }

 private:
  AuditReport& rep_;
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string AuditReport::summary() const {
  std::ostringstream os;
  if (ok()) {
    os << "audit: ok (" << checks_run << " checks)";
    return os.str();
  }
  os << "audit: " << violations.size() << " violation(s) in " << checks_run
     << " checks";
  const std::size_t shown = std::min<std::size_t>(violations.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) os << "\n  " << violations[i];
  if (shown < violations.size())
    os << "\n  ... " << violations.size() - shown << " more";
  return os.str();
}

AuditReport audit_phase1(const std::vector<IterationRecord>& trace,
                         const SolverParams& prm) {
  AuditReport rep;
  Checker ck(rep);
  if (trace.empty()) {
    rep.violations.push_back("empty trace");
    return rep;
  }

  // trace shape: consecutive iteration rows, one final sentinel
  const int n = static_cast<int>(trace.size());
  ck.check(trace.back().kind == IterKind::terminated, n - 1,
           "trace does not end in a termination row");
  for (int i = 0; i < n; ++i) {
    const auto& r = trace[i];
    const bool sentinel = r.kind == IterKind::terminated;
    ck.check(sentinel == (i == n - 1), i, "termination row out of place");
    if (!sentinel)
      ck.check(is_f(r.kind) || is_v(r.kind), i,
               std::string("unknown iteration kind ") + iter_kind_name(r.kind));
    ck.check(r.k == i, i, "non-consecutive iteration index");
  }

  for (int i = 0; i < n; ++i) {
    const auto& r = trace[i];
    // funnel containment, positivity
    ck.check(r.vmax > 0, i, "vmax not positive: " + num(r.vmax));
    ck.check(r.v <= r.vmax * (1 + 1e-12), i,
             "infeasibility escapes the funnel: v=" + num(r.v) +
                 " vmax=" + num(r.vmax));
    ck.check(r.delta_v <= r.delta_vmax * (1 + 1e-12), i,
             "delta_v above delta_vmax");
    if (r.kind == IterKind::terminated) continue;

    // every attempted step is nonzero
    ck.check(r.norm_s > 0, i, "zero trial step recorded");
    // a kept tangential step implies the retention inequalities held
    if (r.t_nonzero) ck.check(r.retention_ok, i, "kept a non-retained step");
    // objective iterations require a nonzero tangential step
    if (is_f(r.kind)) ck.check(r.t_nonzero, i, "objective row without t");

    // normal step no shorter than the Cauchy-point radius
    const double cauchy_r =
        std::min(r.delta_v, r.norm_gv / std::max(r.norm_Hv, 1e-300));
    ck.check(r.norm_n >= cauchy_r * (1 - 1e-9), i,
             "normal step below min(delta_v, ||gv||/||Hv||): ||n||=" +
                 num(r.norm_n) + " bound=" + num(cauchy_r));
    // model decrease bound inherited through retention
    const double mv_bound = 0.5 * prm.kappa_vm * r.norm_gv * cauchy_r;
    ck.check(r.mv_decrease + 1e-12 * std::max(1.0, r.v) >= mv_bound, i,
             "model decrease below the retained Cauchy bound");
    // recorded stationarity residuals of the subproblem solves
    ck.check(r.kkt_n <= 1e-5, i,
             "normal subproblem residual too large: " + num(r.kkt_n));
    ck.check(r.kkt_t <= 1e-5, i,
             "tangential subproblem residual too large: " + num(r.kkt_t));
  }

  // pairwise structure
  int expands_since_success = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const auto& a = trace[i];
    const auto& b = trace[i + 1];
    const bool b_sentinel = b.kind == IterKind::terminated;

    ck.check(b.vmax <= a.vmax, i, "vmax increased");
    ck.check(b.delta_vmax >= a.delta_vmax * (1 - 1e-12), i,
             "delta_vmax decreased");

    if (is_success(a.kind)) {
      // funnel shrinks by at least the cubic margin (ulp slack: the bound
      // is far below rounding on vmax when the step is tiny)
      const double shrink = a.vmax - b.vmax;
      const double margin =
          prm.kappa_rho_funnel * (1 - prm.kappa_v2) * cube(a.norm_s);
      ck.check(shrink + 1e-14 * std::max(1.0, a.vmax) >= margin, i,
               "accepted step shrank the funnel too little");
    } else {
      ck.check(b.vmax == a.vmax, i, "vmax changed on a rejected step");
    }

    // per-kind radius bookkeeping
    const double rtol = 1e-12;
    switch (a.kind) {
      case IterKind::F_success:
        ck.check(b.delta_v == a.delta_v && b.delta_vmax == a.delta_vmax, i,
                 "objective iteration touched the normal radii");
        if (!b_sentinel)
          ck.check(std::abs(b.delta_f -
                            std::max(a.delta_f, prm.gamma_e * a.norm_s)) <=
                       rtol * std::max(1.0, b.delta_f),
                   i, "accepted objective step: delta_f not grown as expected");
        break;
      case IterKind::F_contract:
        ck.check(b.delta_v == a.delta_v && b.delta_vmax == a.delta_vmax, i,
                 "objective iteration touched the normal radii");
        ck.check(b.delta_f <= a.delta_f * (1 + rtol), i,
                 "objective contraction grew delta_f");
        break;
      case IterKind::V_success: {
        ck.check(b.delta_f == a.delta_f, i,
                 "normal iteration touched delta_f");
        const double exp_dmax =
            std::max(a.delta_vmax, prm.gamma_e * a.norm_n);
        ck.check(std::abs(b.delta_vmax - exp_dmax) <=
                     rtol * std::max(1.0, exp_dmax),
                 i, "accepted normal step: delta_vmax not grown as expected");
        const double exp_dv =
            std::min(b.delta_vmax, std::max(a.delta_v, prm.gamma_e * a.norm_n));
        ck.check(std::abs(b.delta_v - exp_dv) <= rtol * std::max(1.0, exp_dv),
                 i, "accepted normal step: delta_v not updated as expected");
        const double v_next = b.v;
        const double exp_vmax = std::min(
            std::max(prm.kappa_v1 * a.vmax,
                     v_next + prm.kappa_v2 * (a.v - v_next)),
            v_next + prm.kappa_v2 * (a.vmax - v_next));
        ck.check(std::abs(b.vmax - exp_vmax) <= rtol * std::max(1.0, exp_vmax),
                 i, "accepted normal step: vmax not updated as expected");
        break;
      }
      case IterKind::V_contract:
        ck.check(b.delta_f == a.delta_f, i,
                 "normal iteration touched delta_f");
        ck.check(b.delta_v <= a.delta_v * (1 + rtol), i,
                 "normal contraction grew delta_v");
        ck.check(b.delta_vmax == a.delta_vmax, i,
                 "normal contraction touched delta_vmax");
        break;
      case IterKind::V_expand: {
        ck.check(b.delta_f == a.delta_f, i,
                 "normal iteration touched delta_f");
        ck.check(b.delta_vmax == a.delta_vmax, i,
                 "expansion touched delta_vmax");
        const double exp_dv =
            std::min(a.delta_vmax, a.lambda_v / a.sigma_v);
        ck.check(std::abs(b.delta_v - exp_dv) <= rtol * std::max(1.0, exp_dv),
                 i, "expansion: delta_v not lambda_v/sigma_v as expected");
        break;
      }
      default:
        break;
    }

    if (is_f(a.kind)) {
      const double exp_vmax_f = std::min(
          std::max(prm.kappa_v1 * a.vmax,
                   a.vmax - prm.kappa_rho_funnel * cube(a.norm_s)),
          b.v + prm.kappa_v2 * (a.vmax - b.v));
      if (a.kind == IterKind::F_success)
        ck.check(std::abs(b.vmax - exp_vmax_f) <=
                     1e-12 * std::max(1.0, exp_vmax_f),
                 i, "accepted objective step: vmax not updated as expected");
    }

    // sigma is frozen except right after a rejected-ratio normal step
    if (b_sentinel) {
      ck.check(b.sigma_v == a.sigma_v, i, "sigma changed on termination row");
    } else if (is_f(a.kind) ||
               !(a.rho_v < prm.kappa_rho_accept)) {
      ck.check(b.sigma_v == a.sigma_v, i,
               "sigma changed without a rejected normal ratio");
    } else {
      const double exp_sigma =
          std::max(a.sigma_v, b.lambda_v / std::max(b.norm_n, 1e-300));
      ck.check(std::abs(b.sigma_v - exp_sigma) <=
                   1e-12 * std::max(1.0, exp_sigma),
               i, "sigma not raised to lambda_v/||n|| after rejection");
    }

    // expansion structure
    if (b.kind == IterKind::V_expand)
      ck.check(a.kind != IterKind::V_contract && a.kind != IterKind::V_expand,
               i + 1, "expansion directly after contraction or expansion");
    if (is_success(a.kind)) expands_since_success = 0;
    if (b.kind == IterKind::V_expand) {
      ++expands_since_success;
      ck.check(expands_since_success <= 1, i + 1,
               "more than one expansion between accepted steps");
    }
  }

  if (trace[0].kind != IterKind::terminated)
    ck.check(trace[0].sigma_v == prm.sigma_min, 0,
             "initial sigma differs from sigma_min");

  ck.check(n - 1 <= prm.max_iter, n - 1, "trace longer than the iteration cap");
  return rep;
}

AuditReport audit_phase2(const Phase2Result& r, const SolverParams& prm,
                         double eps_feas) {
  AuditReport rep;
  Checker ck(rep);
  const auto& ct = r.counters;

  ck.check(ct.bad_residual_norm == 0, -1,
           "official iterates drifted off the residual corridor: " +
               std::to_string(ct.bad_residual_norm));
  ck.check(ct.bad_feasibility == 0, -1,
           "official iterates exceeded the feasibility band: " +
               std::to_string(ct.bad_feasibility));
  ck.check(ct.bad_target_gap == 0, -1,
           "target gap f - t left [0, eps_feas]: " +
               std::to_string(ct.bad_target_gap));
  ck.check(ct.target_increase == 0, -1,
           "target increased: " + std::to_string(ct.target_increase));
  ck.check(ct.bad_accept_ratio == 0, -1,
           "accepted a step with a sub-threshold ratio: " +
               std::to_string(ct.bad_accept_ratio));
  // the solver stops itself at 200 consecutive rejections; a full streak is
  // only legitimate as the event that ended the run
  ck.check(ct.worst_reject_streak < 200 ||
               (ct.worst_reject_streak == 200 &&
                r.status == Phase2Result::Status::iter_limit),
           -1, "reject streak past the stall rule (worst " +
                   std::to_string(ct.worst_reject_streak) + ")");
  ck.check(ct.rows == r.n_accepted + r.n_rejected, -1,
           "row counter out of sync with accept/reject counts");

  // retained rows: corridor pin, accepted-ratio floor, nonincreasing target
  bool have_prev_t = false;
  double prev_t = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& row = r.trace[i];
    const int at = static_cast<int>(i);
    ck.check(std::abs(row.norm_r - eps_feas) <= 1e-8, at,
             "row residual norm off the corridor: " + num(row.norm_r));
    if (row.accepted)
      ck.check(row.rho >= prm.kappa_rho_accept, at,
               "accepted row with ratio " + num(row.rho));
    if (have_prev_t)
      ck.check(row.t <= prev_t + 1e-12 * std::max(1.0, std::abs(prev_t)), at,
               "target increased between rows");
    prev_t = row.t;
    have_prev_t = true;
  }
  return rep;
}

}  // namespace funnel
