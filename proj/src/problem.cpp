#include "funnel/problem.hpp"

#include <cmath>

namespace funnel {

namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(const Vec& v) { return v.allFinite(); }
bool finite(const Mat& m) { return m.allFinite(); }

}  // namespace

EvalPoint evaluate(const NlpProblem& p, const Vec& x) {
  if (x.size() != p.n_vars)
    throw EvalError(p.name + ": point has length " + std::to_string(x.size()) +
                    ", expected " + std::to_string(p.n_vars));
  EvalPoint e;
  e.x = x;
  e.f = p.eval_f(x);
  e.g = p.eval_g(x);
  e.c = p.eval_c(x);
  e.J = p.eval_J(x);
  if (e.g.size() != p.n_vars || e.c.size() != p.n_cons ||
      e.J.rows() != p.n_cons || e.J.cols() != p.n_vars)
    throw EvalError(p.name + ": callback shape mismatch");
  if (!finite(e.f) || !finite(e.g) || !finite(e.c) || !finite(e.J))
    throw EvalError(p.name + ": non-finite value in evaluation");
  return e;
}

double infeasibility(const Vec& c) { return 0.5 * c.squaredNorm(); }

std::vector<Mat> constraint_hessians(const NlpProblem& p, const Vec& x) {
  std::vector<Mat> hs;
  hs.reserve(p.n_cons);
  for (int i = 0; i < p.n_cons; ++i) {
    Mat h = p.eval_hess_ci(x, i);
    if (h.rows() != p.n_vars || h.cols() != p.n_vars || !finite(h))
      throw EvalError(p.name + ": bad constraint hessian " + std::to_string(i));
    hs.push_back(std::move(h));
  }
  return hs;
}

InfeasModel infeasibility_model(const EvalPoint& e,
                                const std::vector<Mat>& hess_ci) {
  InfeasModel m;
  m.v = infeasibility(e.c);
  m.gv = e.J.transpose() * e.c;
  m.Hv = e.J.transpose() * e.J;
  for (int i = 0; i < e.c.size(); ++i) m.Hv += e.c[i] * hess_ci[i];
  m.Hv = 0.5 * (m.Hv + m.Hv.transpose().eval());  // kill roundoff asymmetry
  return m;
}

Mat build_Hk(const NlpProblem& p, const EvalPoint& e, HessMode mode) {
  Mat H = p.eval_hess_f(e.x);
  if (H.rows() != p.n_vars || H.cols() != p.n_vars || !H.allFinite())
    throw EvalError(p.name + ": bad objective hessian");
  if (mode == HessMode::lagrangian) {
    Vec y = least_squares_multipliers(e);
    for (int i = 0; i < p.n_cons; ++i) H += y[i] * p.eval_hess_ci(e.x, i);
  }
  return 0.5 * (H + H.transpose().eval());
}

Vec least_squares_multipliers(const EvalPoint& e) {
  // min ||g + J'y||: rank-revealing least squares on J' with the
  // minimum-norm solution in the rank-deficient case.
  if (e.c.size() == 0) return Vec(0);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(e.J.transpose());
  return cod.solve(-e.g);
}

DerivCheckReport check_derivatives(const NlpProblem& p, const Vec& x, double h,
                                   double tol) {
  DerivCheckReport rep;
  rep.tol = tol;
  const int n = p.n_vars;
  const int m = p.n_cons;

  auto rel = [](double err, double scale) { return err / std::max(1.0, scale); };

  Vec g = p.eval_g(x);
  Mat J = p.eval_J(x);
  Mat Hf = p.eval_hess_f(x);
  std::vector<Mat> Hc;
  for (int i = 0; i < m; ++i) Hc.push_back(p.eval_hess_ci(x, i));

  Vec g_fd(n);
  Mat J_fd(m, n), Hf_fd(n, n);
  std::vector<Mat> Hc_fd(m, Mat(n, n));
  for (int j = 0; j < n; ++j) {
    const double hj = h * std::max(1.0, std::abs(x[j]));
    Vec xp = x, xm = x;
    xp[j] += hj;
    xm[j] -= hj;
    g_fd[j] = (p.eval_f(xp) - p.eval_f(xm)) / (2 * hj);
    J_fd.col(j) = (p.eval_c(xp) - p.eval_c(xm)) / (2 * hj);
    Hf_fd.col(j) = (p.eval_g(xp) - p.eval_g(xm)) / (2 * hj);
    Mat Jp = p.eval_J(xp), Jm = p.eval_J(xm);
    for (int i = 0; i < m; ++i)
      Hc_fd[i].col(j) = (Jp.row(i) - Jm.row(i)).transpose() / (2 * hj);
  }

  rep.err_g = rel((g - g_fd).lpNorm<Eigen::Infinity>(),
                  g.lpNorm<Eigen::Infinity>());
  rep.err_J = m == 0 ? 0.0
                     : rel((J - J_fd).lpNorm<Eigen::Infinity>(),
                           J.lpNorm<Eigen::Infinity>());
  rep.err_hess_f = rel((Hf - Hf_fd).lpNorm<Eigen::Infinity>(),
                       Hf.lpNorm<Eigen::Infinity>());
  rep.pass = rep.err_g <= tol && rep.err_J <= tol && rep.err_hess_f <= tol;
  for (int i = 0; i < m; ++i) {
    double e = rel((Hc[i] - Hc_fd[i]).lpNorm<Eigen::Infinity>(),
                   Hc[i].lpNorm<Eigen::Infinity>());
    rep.err_hess_ci.push_back(e);
    rep.pass = rep.pass && e <= tol;
  }
  return rep;
}

}  // namespace funnel
