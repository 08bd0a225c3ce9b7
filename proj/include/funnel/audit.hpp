#pragma once

#include <string>
#include <vector>

#include "funnel/params.hpp"
#include "funnel/phase1.hpp"
#include "funnel/phase2.hpp"

namespace funnel {

struct AuditReport {
  std::vector<std::string> violations;
  int checks_run = 0;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Re-derives every trace-level invariant of the feasibility phase:
// funnel containment and monotone shrink, cubic decrease on successes,
// nonzero steps, retention flags, per-kind radius monotonicity, the
// no-expansion-after-contraction and one-expansion-between-successes
// structure, the normal-step lower bound, the model-decrease lower bound,
// and the recorded subproblem stationarity residuals.
AuditReport audit_phase1(const std::vector<IterationRecord>& trace,
                         const SolverParams& prm);

// Corridor checks for the optimality phase: ||r|| pinned at eps_feas on
// accepted iterates, ||c|| <= eps_feas, 0 <= f - t <= eps_feas, target
// nonincreasing, accepted ratios above threshold, and no unbounded
// rejection streaks. Uses the streaming counters (authoritative for the
// whole run) plus the retained rows.
AuditReport audit_phase2(const Phase2Result& r, const SolverParams& prm,
                         double eps_feas);

}  // namespace funnel
