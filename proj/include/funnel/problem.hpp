#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace funnel {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when a callback produces NaN/Inf or fails outright; run loops map it
// to an eval_error status instead of crashing.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Equality-constrained problem: min f(x) s.t. c(x) = 0, with analytic
// derivatives supplied as callbacks. M <= N throughout.
struct NlpProblem {
  std::string name;
  int n_vars = 0;
  int n_cons = 0;
  Vec x0;
  std::function<double(const Vec&)> eval_f;
  std::function<Vec(const Vec&)> eval_g;        // gradient of f, length N
  std::function<Vec(const Vec&)> eval_c;        // constraint values, length M
  std::function<Mat(const Vec&)> eval_J;        // constraint Jacobian, M x N
  std::function<Mat(const Vec&)> eval_hess_f;   // N x N symmetric
  std::function<Mat(const Vec&, int)> eval_hess_ci;  // hessian of c_i, N x N
  std::optional<double> known_fopt;  // reference value for regression only
};

// All first-order data at one point, cached so each callback runs once.
struct EvalPoint {
  Vec x;
  double f = 0.0;
  Vec g;
  Vec c;
  Mat J;
};

// v = 0.5*||c||^2 and its derivatives: gv = J^T c, Hv = J^T J + sum c_i H_ci.
struct InfeasModel {
  double v = 0.0;
  Vec gv;
  Mat Hv;
};

struct DerivCheckReport {
  double err_g = 0.0;
  double err_J = 0.0;
  double err_hess_f = 0.0;
  std::vector<double> err_hess_ci;
  double tol = 0.0;
  bool pass = false;
};

enum class HessMode { exact_f, lagrangian };

// One call per callback; throws EvalError on non-finite values or shape
// mismatches.
EvalPoint evaluate(const NlpProblem& p, const Vec& x);

double infeasibility(const Vec& c);

std::vector<Mat> constraint_hessians(const NlpProblem& p, const Vec& x);

InfeasModel infeasibility_model(const EvalPoint& e,
                                const std::vector<Mat>& hess_ci);

// exact_f: H = hess_f. lagrangian: H = hess_f + sum y_i hess_ci with
// least-squares multipliers y.
Mat build_Hk(const NlpProblem& p, const EvalPoint& e, HessMode mode);

// argmin_y ||g + J^T y||, minimum-norm when J is rank deficient.
Vec least_squares_multipliers(const EvalPoint& e);

// Central differences with per-coordinate step h*max(1,|x_i|); relative
// errors measured against max(1, ||analytic||_inf) per block.
DerivCheckReport check_derivatives(const NlpProblem& p, const Vec& x,
                                   double h = 1e-6, double tol = 1e-4);

}  // namespace funnel
