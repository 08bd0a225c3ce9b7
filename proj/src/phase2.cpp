#include "funnel/phase2.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "funnel/subproblems.hpp"

namespace funnel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All internal arithmetic tracks the gap d = f - t instead of t itself:
// with |f| large and d near eps_feas, f - (f - d) destroys most of d's
// digits, while d propagates exactly (d' = Δf + d, restore by the corridor
// formula).
void phi_from_gap(const EvalPoint& e, double d, const Mat& hess_f,
                  const std::vector<Mat>& hess_ci, double& value, Vec& grad,
                  Mat& hess) {
  value = 0.5 * (e.c.squaredNorm() + d * d);
  grad = e.J.transpose() * e.c + d * e.g;
  hess = e.J.transpose() * e.J;
  for (int i = 0; i < e.c.size(); ++i) hess += e.c[i] * hess_ci[i];
  hess += e.g * e.g.transpose();
  hess += d * hess_f;
  hess = 0.5 * (hess + hess.transpose().eval());
}

double rel_kkt_value(const EvalPoint& e, const Vec& y) {
  return (e.g + e.J.transpose() * y).norm() / std::sqrt(y.squaredNorm() + 1.0);
}

}  // namespace

const char* phase2_status_name(Phase2Result::Status s) {
  switch (s) {
    case Phase2Result::Status::relative_kkt: return "relative_kkt";
    case Phase2Result::Status::infeasibility_stationary:
      return "infeasibility_stationary";
    case Phase2Result::Status::iter_limit: return "iter_limit";
    case Phase2Result::Status::eval_error: return "eval_error";
  }
  return "?";
}

Vec residual(const EvalPoint& e, double t) {
  Vec r(e.c.size() + 1);
  r.head(e.c.size()) = e.c;
  r[e.c.size()] = e.f - t;
  return r;
}

void phi_model(const EvalPoint& e, double t, const Mat& hess_f,
               const std::vector<Mat>& hess_ci, double& value, Vec& grad,
               Mat& hess) {
  phi_from_gap(e, e.f - t, hess_f, hess_ci, value, grad, hess);
}

double initial_target(double f0, double norm_c0, double eps_feas) {
  if (norm_c0 > eps_feas)
    throw std::invalid_argument(
        "initial_target: start point violates the feasibility corridor");
  return f0 - std::sqrt(std::max(eps_feas * eps_feas - norm_c0 * norm_c0, 0.0));
}

double update_target(double r_prev_norm, double r_next_norm, double f_next,
                     double t) {
  const double gap = f_next - t;
  const double rad =
      r_prev_norm * r_prev_norm - r_next_norm * r_next_norm + gap * gap;
  return f_next - std::sqrt(std::max(rad, 0.0));
}

Phase2Result run_phase2(const NlpProblem& p, const Vec& x_start,
                        const SolverParams& prm, const Phase2Options& opt) {
  prm.validate();
  Phase2Result res;
  res.x = x_start;

  EvalPoint e;
  std::vector<Mat> hc;
  Mat hf;
  auto eval_full = [&](const Vec& x) {
    e = evaluate(p, x);
    hc = constraint_hessians(p, x);
    hf = p.eval_hess_f(x);
    if (!hf.allFinite()) throw EvalError(p.name + ": bad objective hessian");
  };

  try {
    eval_full(x_start);
  } catch (const EvalError& err) {
    res.status = Phase2Result::Status::eval_error;
    res.error = err.what();
    return res;
  }

  const double norm_c0 = e.c.norm();
  if (norm_c0 > opt.eps_feas * (1 + 1e-10))
    throw std::invalid_argument(
        "run_phase2: start point violates the feasibility corridor");
  double d = std::sqrt(
      std::max(opt.eps_feas * opt.eps_feas - norm_c0 * norm_c0, 0.0));

  double phi;
  Vec gphi;
  Mat Hphi;
  phi_from_gap(e, d, hf, hc, phi, gphi, Hphi);

  auto ls_dual = [&](const EvalPoint& ep) {
    const Vec y = least_squares_multipliers(ep);
    const double rinf = (ep.g + ep.J.transpose() * y).lpNorm<Eigen::Infinity>();
    return std::make_pair(y, rinf);
  };
  double dual_scale = 1.0;
  if (opt.practical_dual_tol > 0) dual_scale = std::max(1.0, ls_dual(e).second);

  // Termination tests at an official or just-accepted point. `grad` and
  // `norm_r` belong to the target the test is stated with (t_k for the
  // post-step check).
  auto check_termination =
      [&](const EvalPoint& ep, double gap, const Vec& grad,
          double norm_r) -> std::optional<Phase2Result::Status> {
    if (norm_r > 0 && grad.norm() <= opt.eps * norm_r) {
      if (gap == 0.0) {
        auto [y, rinf] = ls_dual(ep);
        (void)rinf;
        res.y = y;
        res.final_rel_kkt = rel_kkt_value(ep, y);
        return Phase2Result::Status::infeasibility_stationary;
      }
      const Vec y = ep.c / gap;
      res.y = y;
      res.final_rel_kkt = rel_kkt_value(ep, y);
      return Phase2Result::Status::relative_kkt;
    }
    if (opt.practical_dual_tol > 0) {
      auto [y, rinf] = ls_dual(ep);
      if (rinf <= opt.practical_dual_tol * dual_scale) {
        res.y = y;
        res.final_rel_kkt = rel_kkt_value(ep, y);
        return Phase2Result::Status::relative_kkt;
      }
    }
    return std::nullopt;
  };

  auto& ct = res.counters;
  auto corridor_check = [&](double norm_c, double gap, double t_new,
                            double t_old, bool have_prev) {
    const double r_norm = std::sqrt(norm_c * norm_c + gap * gap);
    if (std::abs(r_norm - opt.eps_feas) > 1e-8) ++ct.bad_residual_norm;
    if (norm_c > opt.eps_feas + 1e-10) ++ct.bad_feasibility;
    if (gap < -1e-10 || gap > opt.eps_feas + 1e-10) ++ct.bad_target_gap;
    if (have_prev && t_new > t_old + 1e-12 * std::max(1.0, std::abs(t_old)))
      ++ct.target_increase;
  };
  corridor_check(norm_c0, d, e.f - d, 0.0, false);

  std::deque<Phase2Row> ring;
  auto push_row = [&](const Phase2Row& row) {
    ring.push_back(row);
    if (static_cast<std::int64_t>(ring.size()) > opt.trace_cap) {
      ring.pop_front();
      ++res.dropped_rows;
    }
  };

  auto finalize = [&](Phase2Result::Status status) {
    res.status = status;
    res.x = e.x;
    res.t = e.f - d;
    if (res.y.size() == 0) {
      auto [y, rinf] = ls_dual(e);
      (void)rinf;
      res.y = y;
      res.final_rel_kkt = rel_kkt_value(e, y);
    }
    res.trace.assign(ring.begin(), ring.end());
    ct.rows = res.n_accepted + res.n_rejected;
  };

  if (auto st = check_termination(e, d, gphi,
                                  std::sqrt(e.c.squaredNorm() + d * d))) {
    finalize(*st);
    return res;
  }

  double delta = prm.delta_v0;
  double delta_max = prm.delta_vmax0;
  double sigma = prm.sigma_min;
  double prev_rho = kInf;
  std::int64_t reject_streak = 0;
  // regularized primal-dual pair from the last contraction; at radius
  // ||n(lambda)|| it IS the trust-region solution, so reuse it while x and
  // the model are unchanged. Recovering lambda from the rounded radius
  // instead can livelock in a flat valley: ||n(gamma*lambda)|| rounds back
  // to the old radius and the re-solve recovers the old multiplier, so the
  // shifts never compound.
  bool carry_valid = false;
  double carry_lambda = 0.0, carry_norm = 0.0;
  Vec carry_step;
  // an expansion sets the radius to exactly multiplier/sigma, which already
  // IS the statement "the ratio test holds at the new radius". Re-deriving
  // the quotient from the next solve can lose that to rounding when the
  // multiplier sits on a hard-case plateau: the recovered multiplier wobbles
  // an ulp above the old one, the ratio lands an ulp above sigma, and the
  // re-expansion reproduces the same radius bitwise -- a rejection fixed
  // point. Deem the test satisfied on the solve right after an expansion.
  bool after_expansion = false;

  const auto t_start = std::chrono::steady_clock::now();
  auto out_of_time = [&]() {
    if (opt.time_limit <= 0) return false;
    const std::chrono::duration<double> el =
        std::chrono::steady_clock::now() - t_start;
    return el.count() > opt.time_limit;
  };

  for (std::int64_t k = 0;; ++k) {
    if (k >= opt.max_iter || out_of_time()) {
      finalize(Phase2Result::Status::iter_limit);
      return res;
    }

    TrsSolution trs;
    EvalPoint et;
    try {
      if (carry_valid && delta == carry_norm) {
        trs.step = carry_step;
        trs.multiplier = carry_lambda;
        trs.on_boundary = true;
        trs.model_decrease =
            -(gphi.dot(carry_step) + 0.5 * carry_step.dot(Hphi * carry_step));
      } else {
        trs = solve_trs(gphi, Hphi, delta);
      }
      if (!(trs.step.norm() > 1e-20)) {
        res.error = "stalled: vanishing trial step";
        finalize(Phase2Result::Status::iter_limit);
        return res;
      }
      if (prev_rho < prm.kappa_rho_accept)
        sigma = std::max(sigma, trs.multiplier / trs.step.norm());
      et = evaluate(p, e.x + trs.step);
    } catch (const std::exception& err) {
      res.error = err.what();
      finalize(Phase2Result::Status::eval_error);
      return res;
    }

    const double ns = trs.step.norm();
    const double d_trial = (et.f - e.f) + d;  // gap under the old target
    const double phi_trial =
        0.5 * (et.c.squaredNorm() + d_trial * d_trial);
    const double rho = (phi - phi_trial) / (ns * ns * ns);
    // division form: the sigma raise above uses the same quotient, so its
    // equality case must accept rather than ulp-flip into an expansion
    const bool gate = trs.multiplier / ns <= sigma ||
                      std::abs(ns - delta_max) <= 1e-10 * delta_max ||
                      after_expansion;

    Phase2Row row;
    row.k = k;
    row.phi = phi;
    row.norm_r = std::sqrt(e.c.squaredNorm() + d * d);
    row.t = e.f - d;
    row.norm_grad_phi = gphi.norm();
    row.delta = delta;
    row.lambda = trs.multiplier;
    row.rho = rho;

    if (rho >= prm.kappa_rho_accept && gate) {
      row.accepted = true;
      if (rho < prm.kappa_rho_accept) ++ct.bad_accept_ratio;  // self-check
      ++res.n_accepted;
      reject_streak = 0;
      carry_valid = false;
      after_expansion = false;

      const double t_prev = e.f - d;
      const Vec grad_oldt = et.J.transpose() * et.c + d_trial * et.g;
      const double norm_r_oldt =
          std::sqrt(et.c.squaredNorm() + d_trial * d_trial);

      if (auto st = check_termination(et, d_trial, grad_oldt, norm_r_oldt)) {
        e = et;
        d = d_trial;
        push_row(row);
        finalize(*st);
        return res;
      }

      // restore the corridor: pick the gap putting ||r|| back at eps_feas
      const double d_next = std::sqrt(std::max(
          opt.eps_feas * opt.eps_feas - et.c.squaredNorm(), 0.0));
      delta_max = std::max(delta_max, prm.gamma_e * ns);
      delta = std::min(delta_max, std::max(delta, prm.gamma_e * ns));

      try {
        eval_full(et.x);
      } catch (const EvalError& err) {
        res.error = err.what();
        finalize(Phase2Result::Status::eval_error);
        return res;
      }
      d = d_next;
      phi_from_gap(e, d, hf, hc, phi, gphi, Hphi);
      corridor_check(e.c.norm(), d, e.f - d, t_prev, true);
    } else if (rho < prm.kappa_rho_accept) {
      row.accepted = false;
      ++res.n_rejected;
      ++reject_streak;
      after_expansion = false;
      try {
        if (trs.multiplier < prm.sigma_min * ns) {
          const auto [lam, n_lam] = v_contract_lambda_search(
              gphi, Hphi, trs.multiplier, prm.sigma_min, prm.sigma_max);
          delta = n_lam.norm();
          carry_lambda = lam;
          carry_step = n_lam;
          carry_norm = delta;
          carry_valid = true;
        } else {
          double lam = prm.gamma_lambda * trs.multiplier;
          for (int a = 0;; ++a) {
            try {
              const Vec n_lam = solve_regularized(gphi, Hphi, lam);
              const double nl = n_lam.norm();
              if (nl >= prm.gamma_c_V * ns) {
                delta = nl;
                carry_lambda = lam;
                carry_step = n_lam;
                carry_norm = nl;
                carry_valid = true;
              } else {
                delta = prm.gamma_c_V * ns;  // overshot: floor the radius
                carry_valid = false;
              }
              break;
            } catch (const std::invalid_argument&) {
              if (a >= 64) throw;
              lam *= prm.gamma_lambda;
            }
          }
        }
      } catch (const std::exception& err) {
        res.error = err.what();
        finalize(Phase2Result::Status::eval_error);
        return res;
      }
    } else {
      row.accepted = false;  // expansion: radius grows, point stays
      ++res.n_rejected;
      ++reject_streak;
      delta = std::min(delta_max, trs.multiplier / sigma);
      carry_valid = false;
      after_expansion = true;
    }

    prev_rho = rho;
    ct.worst_reject_streak = std::max(ct.worst_reject_streak, reject_streak);
    push_row(row);
    if (reject_streak >= 200) {
      res.error = "stalled: 200 consecutive rejections";
      finalize(Phase2Result::Status::iter_limit);
      return res;
    }
  }
}

}  // namespace funnel
