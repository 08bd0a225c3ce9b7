#include "funnel/phase1.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

#include "funnel/audit.hpp"
#include "funnel/corpus.hpp"

using namespace funnel;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// bundle that satisfies all six objective-step conditions
StepBundle passing_bundle() {
  StepBundle b;
  b.n = vec2(0.1, 0);
  b.t = vec2(0, 0.5);
  b.s = b.n + b.t;
  b.lambda_v = 0.0;
  b.mf0 = 1.0;
  b.mfn = 0.5;
  b.mfs = 0.2;
  return b;
}

}  // namespace

TEST_CASE("decrease ratios are measured per unit step cubed") {
  CHECK(rho_f(1.0, 0.0, vec2(1, 0)) == doctest::Approx(1.0));
  CHECK(rho_f(2.0, 1.5, vec2(0.5, 0)) == doctest::Approx(4.0));
  CHECK(rho_v(2.0, 1.5, vec2(0.5, 0)) == doctest::Approx(4.0));
  CHECK(rho_v(1.0, 2.0, vec2(1, 0)) == doctest::Approx(-1.0));
}

TEST_CASE("funnel shrink after an accepted objective step") {
  SolverParams prm;
  // min{max{0.9, 1 - 1e-12}, 0.5 + 0.9*0.5} = 0.95
  CHECK(update_vmax_f(1.0, 0.5, vec2(1, 0), prm) ==
        doctest::Approx(0.95).epsilon(1e-14));
}

TEST_CASE("funnel shrink after an accepted normal step") {
  SolverParams prm;
  // min{max{0.9, 0.9}, 0.9} = 0.9
  CHECK(update_vmax_v(1.0, 1.0, 0.0, prm) == doctest::Approx(0.9).epsilon(1e-14));
  // min{max{1.8, 0.95}, 1.85} = 1.8
  CHECK(update_vmax_v(2.0, 1.0, 0.5, prm) == doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("sigma freezes and raises by the previous-iteration rule") {
  SolverParams prm;
  const Vec n = vec2(1, 0);

  SUBCASE("raised after a rejected normal step") {
    CHECK(compute_sigma(n, 5.0, 2.0, 1e-9, IterKind::V_contract, prm) ==
          doctest::Approx(5.0));
  }
  SUBCASE("never lowered") {
    CHECK(compute_sigma(n, 5.0, 10.0, 1e-9, IterKind::V_contract, prm) ==
          doctest::Approx(10.0));
  }
  SUBCASE("frozen across objective iterations") {
    CHECK(compute_sigma(n, 5.0, 2.0, 1e-9, IterKind::F_success, prm) == 2.0);
    CHECK(compute_sigma(n, 5.0, 2.0, 1e-9, IterKind::F_contract, prm) == 2.0);
  }
  SUBCASE("frozen after a good ratio") {
    CHECK(compute_sigma(n, 5.0, 2.0, 0.5, IterKind::V_success, prm) == 2.0);
  }
  SUBCASE("frozen on the first iteration") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(compute_sigma(n, 5.0, 2.0, inf, IterKind::none, prm) == 2.0);
  }
}

TEST_CASE("objective-step conditions: each clause can veto alone") {
  SolverParams prm;
  const double vmax = 1.0, v_trial = 0.5, sigma_v = 1.0;

  SUBCASE("base bundle passes") {
    CHECK(f_conditions_hold(passing_bundle(), vmax, v_trial, sigma_v, 0.0, prm));
  }
  SUBCASE("zero tangential step") {
    StepBundle b = passing_bundle();
    b.t = Vec::Zero(2);
    b.s = b.n;
    CHECK(!f_conditions_hold(b, vmax, v_trial, sigma_v, 0.0, prm));
  }
  SUBCASE("tangential step too small against the full step") {
    StepBundle b = passing_bundle();
    b.t = vec2(0, 1e-20);
    b.s = b.n + b.t;
    CHECK(!f_conditions_hold(b, vmax, v_trial, sigma_v, 0.0, prm));
  }
  SUBCASE("objective model got worse") {
    StepBundle b = passing_bundle();
    b.mf0 = 0.2;
    b.mfs = 0.2001;
    CHECK(!f_conditions_hold(b, vmax, v_trial, sigma_v, 0.0, prm));
  }
  SUBCASE("trial infeasibility does not clear the funnel margin") {
    StepBundle b = passing_bundle();
    CHECK(!f_conditions_hold(b, vmax, /*v_trial=*/1.0, sigma_v, 0.0, prm));
  }
  SUBCASE("steps point against each other") {
    StepBundle b = passing_bundle();
    b.n = vec2(0.1, -0.26);
    b.s = b.n + b.t;
    CHECK(!f_conditions_hold(b, vmax, v_trial, sigma_v, 0.0, prm));
  }
  SUBCASE("normal multiplier above the sigma cap") {
    StepBundle b = passing_bundle();
    b.lambda_v = 1.0;
    CHECK(!f_conditions_hold(b, vmax, v_trial, sigma_v, 0.0, prm));
  }
  SUBCASE("model hessian strays too far") {
    StepBundle b = passing_bundle();
    CHECK(!f_conditions_hold(b, vmax, v_trial, sigma_v, /*hess_err=*/1e30, prm));
  }
}

TEST_CASE("feasibility phase reaches near-feasibility on BT10") {
  const NlpProblem p = corpus_lookup("BT10");
  SolverParams prm;
  Phase1Options opt;
  const Phase1Result r = run_phase1(p, prm, opt);

  REQUIRE(r.status == Phase1Result::Status::near_feasible);
  CHECK(r.n_viter + r.n_fiter >= 1);
  CHECK(r.n_viter + r.n_fiter <= 100);

  // the practical guarantee, re-checked from scratch at the returned point
  const EvalPoint e0 = evaluate(p, p.x0);
  const EvalPoint ef = evaluate(p, r.x);
  const double scale = std::max(e0.c.lpNorm<Eigen::Infinity>(), 1.0);
  CHECK(ef.c.lpNorm<Eigen::Infinity>() <= prm.feas_tol * scale);

  REQUIRE(!r.trace.empty());
  CHECK(r.trace.back().kind == IterKind::terminated);
  CHECK(r.trace.back().f == r.f);
  CHECK(r.trace.back().norm_c == r.norm_c);
}

TEST_CASE("normal-only mode never takes objective iterations") {
  const NlpProblem p = corpus_lookup("BT10");
  SolverParams prm;
  Phase1Options opt;
  opt.mode = SolveMode::v_only;
  const Phase1Result r = run_phase1(p, prm, opt);
  REQUIRE(r.status == Phase1Result::Status::near_feasible);
  CHECK(r.n_fiter == 0);
  for (const auto& row : r.trace) {
    CHECK(row.kind != IterKind::F_success);
    CHECK(row.kind != IterKind::F_contract);
  }
}

TEST_CASE("both modes terminate cleanly and pass the invariant audit") {
  SolverParams prm;
  for (const char* name : {"MARATOS", "HS6", "HS7", "BT10", "BT2"}) {
    for (SolveMode mode : {SolveMode::full, SolveMode::v_only}) {
      CAPTURE(name);
      CAPTURE(mode == SolveMode::full ? "full" : "v_only");
      const NlpProblem p = corpus_lookup(name);
      Phase1Options opt;
      opt.mode = mode;
      const Phase1Result r = run_phase1(p, prm, opt);
      CHECK(r.status == Phase1Result::Status::near_feasible);
      const AuditReport rep = audit_phase1(r.trace, prm);
      CAPTURE(rep.summary());
      CHECK(rep.ok());
      CHECK(rep.checks_run > 0);
    }
  }
}

TEST_CASE("theory-mode termination classifies feasibility") {
  const NlpProblem p = corpus_lookup("MARATOS");
  SolverParams prm;
  prm.epsilon = 1e-6;
  Phase1Options opt;
  opt.theory = true;
  opt.eps_feas = 1e-4;
  const Phase1Result r = run_phase1(p, prm, opt);
  REQUIRE(r.status == Phase1Result::Status::near_feasible);
  CHECK(evaluate(p, r.x).c.norm() <= 1e-4);
}

TEST_CASE("the auditor rejects a tampered trace") {
  const NlpProblem p = corpus_lookup("BT10");
  SolverParams prm;
  Phase1Options opt;
  Phase1Result r = run_phase1(p, prm, opt);
  REQUIRE(r.status == Phase1Result::Status::near_feasible);
  REQUIRE(audit_phase1(r.trace, prm).ok());
  REQUIRE(r.trace.size() >= 2);
  r.trace.back().vmax *= 2.0;  // funnel must never widen
  CHECK(!audit_phase1(r.trace, prm).ok());
}

TEST_CASE("evaluation failures surface as a status, not a crash") {
  NlpProblem p = corpus_lookup("HS6");
  auto good = p.eval_f;
  auto calls = std::make_shared<int>(0);
  p.eval_f = [good, calls](const Vec& x) {
    if (++*calls > 1) return std::nan("");
    return good(x);
  };
  SolverParams prm;
  Phase1Options opt;
  const Phase1Result r = run_phase1(p, prm, opt);
  CHECK(r.status == Phase1Result::Status::eval_error);
  CHECK(!r.error.empty());
  REQUIRE(!r.trace.empty());
  CHECK(r.trace.back().kind == IterKind::terminated);
}

TEST_CASE("iteration-kind names are stable strings") {
  CHECK(std::string(iter_kind_name(IterKind::F_success)) == "F_success");
  CHECK(std::string(iter_kind_name(IterKind::V_expand)) == "V_expand");
  CHECK(std::string(iter_kind_name(IterKind::terminated)) == "terminated");
  CHECK(std::string(phase1_status_name(
            Phase1Result::Status::near_feasible)) == "near_feasible");
}
