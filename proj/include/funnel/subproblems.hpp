#pragma once

#include <utility>

#include "funnel/problem.hpp"

namespace funnel {

// Globally optimal trust-region step with its dual certificate:
//   (H + multiplier*I) step = -g,  multiplier >= 0,
//   multiplier * (delta - ||step||) = 0,  H + multiplier*I PSD.
struct TrsSolution {
  Vec step;
  double multiplier = 0.0;
  bool on_boundary = false;
  bool hard_case = false;
  double model_decrease = 0.0;  // -(g'step + 0.5 step'H step), >= 0
};

// Orthonormal basis of Null(J); rank detected at
// tol = 1e-12 * sigma_max * max(M,N).
struct NullBasis {
  Mat Z;  // N x (N - rank), Z'Z = I, JZ = 0
  int rank = 0;
};

struct TangentialSolution {
  Vec t;              // J t = 0
  Vec yf;             // equality multipliers (minimum-norm least squares)
  double lambda_f = 0.0;
  bool on_boundary = false;
};

// Dense factorization-based solver: Cholesky plus safeguarded Newton on the
// secular equation 1/||n(lambda)|| = 1/delta; spectral decomposition is used
// only when the gradient has no component against the leftmost eigenspace
// (the hard case) or g = 0 with indefinite H.
TrsSolution solve_trs(const Vec& g, const Mat& H, double delta);

// Unique solution of (H + lambda I) n = -g; requires H + lambda I positive
// definite (throws std::invalid_argument otherwise). This n globally solves
// the trust-region problem with radius ||n||.
Vec solve_regularized(const Vec& g, const Mat& H, double lambda);

NullBasis null_space_basis(const Mat& J);

// Z Z' (g + H n): the free-directions component of the shifted gradient.
Vec projected_gradient(const Vec& g, const Mat& H, const Vec& n,
                       const NullBasis& basis);

// min g'(n+t) + 0.5 (n+t)'H(n+t)  s.t.  J t = 0, ||n+t|| <= delta_s,
// solved in Null(J) coordinates with reduced radius
// sqrt(delta_s^2 - ||n_range||^2). Requires ||n|| <= delta_s.
TangentialSolution solve_tangential(const Vec& g, const Mat& H, const Mat& J,
                                    const Vec& n, double delta_s);

// Multiplier-given variant: t with J t = 0 from the reduced solve
// (Z'HZ + lambda_f I) u = -Z'(g + H n_range), t = Z u - n_null. Requires the
// reduced matrix positive definite. ||n + t(lambda_f)|| decreases in
// lambda_f toward ||n_range||.
Vec solve_tangential_regularized(const Vec& g, const Mat& H, const Mat& J,
                                 const Vec& n, double lambda_f);

// Raise the normal-step multiplier from lambda_v until
// lambda/||n(lambda)|| lands in [sigma_min, sigma_max]: first try
// lhat = lambda_v + sqrt(sigma_min*||gv||); if its ratio exceeds sigma_max,
// bisect inside (lambda_v, lhat) on the monotone ratio. Requires
// ||gv|| > 0 and Hv + lambda I PD for lambda > lambda_v.
std::pair<double, Vec> v_contract_lambda_search(const Vec& gv, const Mat& Hv,
                                                double lambda_v,
                                                double sigma_min,
                                                double sigma_max);

// Find lambda > lambda_f with sigma_min <= lambda/||n + t(lambda)||
// (the ratio grows without bound, so geometric growth terminates).
std::pair<double, Vec> f_contract_lambda_search(const Vec& g, const Mat& H,
                                                const Mat& J, const Vec& n,
                                                double lambda_f,
                                                double sigma_min);

}  // namespace funnel
