#include "funnel/subproblems.hpp"

#include <cmath>
#include <stdexcept>

namespace funnel {

namespace {

constexpr double kBoundaryRtol = 1e-11;  // |‖n‖-δ| acceptance band, relative

Vec solve_refined(const Eigen::LLT<Mat>& llt, const Mat& A, const Vec& b) {
  Vec x = llt.solve(b);
  x += llt.solve(b - A * x);  // one round of iterative refinement
  return x;
}

double safeguard(double lo, double hi) {
  return std::max(std::sqrt(lo * hi), lo + 1e-3 * (hi - lo));
}

TrsSolution pack(const Vec& g, const Mat& H, double delta, Vec n, double lam,
                 bool hard) {
  TrsSolution s;
  s.multiplier = std::max(0.0, lam);
  s.on_boundary = s.multiplier > 0.0 || n.norm() >= delta * (1 - 1e-9);
  s.hard_case = hard;
  s.model_decrease = -(g.dot(n) + 0.5 * n.dot(H * n));
  s.step = std::move(n);
  return s;
}

// Spectral route: exact in the eigenbasis. Only used when g = 0, when the
// Cholesky/Newton loop detects the hard case (bracket collapse), or as a
// last-resort fallback; the easy case stays factorization-based so that an
// eigendecomposition-by-construction check is an independent oracle.
TrsSolution solve_trs_spectral(const Vec& g, const Mat& H, double delta) {
  const int N = static_cast<int>(g.size());
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("trust-region solve: eigendecomposition failed");
  const Vec d = es.eigenvalues();  // ascending
  const Mat U = es.eigenvectors();
  const Vec b = U.transpose() * (-g);

  const double span =
      std::max({1.0, std::abs(d[0]), std::abs(d[N - 1])});
  const double gap_tol = 1e-12 * span;
  const double lam_floor = std::max(0.0, -d[0]);

  double bleft2 = 0.0;  // gradient mass on the leftmost eigenspace
  for (int i = 0; i < N; ++i)
    if (d[i] - d[0] <= gap_tol) bleft2 += b[i] * b[i];
  const bool grad_sees_leftmost =
      std::sqrt(bleft2) > 1e-12 * std::max(1.0, g.norm());

  auto coords_at = [&](double lam) {
    Vec u(N);
    for (int i = 0; i < N; ++i) {
      const double den = d[i] + lam;
      u[i] = den > gap_tol ? b[i] / den : 0.0;  // pseudo-inverse convention
    }
    return u;
  };

  auto boundary_bisect = [&](double lo, bool lo_is_above) {
    // ‖u(λ)‖ is strictly decreasing on (lo, ∞); lo_is_above says the lo
    // endpoint counts as the ‖u‖>δ side (true when the limit there is +∞).
    double hi = lam_floor + span + g.norm() / delta;  // ‖u(hi)‖ <= δ always
    (void)lo_is_above;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (coords_at(mid).norm() > delta)
        lo = mid;
      else
        hi = mid;
    }
    return pack(g, H, delta, Vec(U * coords_at(hi)), hi, false);
  };

  if (d[0] > gap_tol) {  // positive definite
    const Vec u0 = coords_at(0.0);
    if (u0.norm() <= delta * (1 + kBoundaryRtol))
      return pack(g, H, delta, Vec(U * u0), 0.0, false);
    return boundary_bisect(0.0, false);
  }

  if (grad_sees_leftmost)  // secular root exists strictly above the floor
    return boundary_bisect(lam_floor, true);

  // Gradient orthogonal to the leftmost eigenspace: pseudo-inverse point.
  const Vec p = coords_at(lam_floor);
  if (p.norm() > delta * (1 + kBoundaryRtol))
    return boundary_bisect(lam_floor, false);

  if (lam_floor <= 0.0)  // positive semidefinite, interior minimal-norm point
    return pack(g, H, delta, Vec(U * p), 0.0, false);

  // Hard case proper: pad with leftmost eigenvector mass up to the radius.
  Vec u1 = U.col(0);
  for (int i = 0; i < N; ++i)
    if (std::abs(u1[i]) > 1e-12) {  // deterministic sign
      if (u1[i] < 0) u1 = -u1;
      break;
    }
  const double tau =
      std::sqrt(std::max(delta * delta - p.squaredNorm(), 0.0));
  return pack(g, H, delta, Vec(U * p + tau * u1), lam_floor, true);
}

}  // namespace

TrsSolution solve_trs(const Vec& g, const Mat& H_in, double delta) {
  if (!(delta > 0) || !std::isfinite(delta))
    throw std::invalid_argument("solve_trs: radius must be positive");
  const Mat H = 0.5 * (H_in + H_in.transpose());
  const double gnorm = g.norm();
  if (gnorm == 0.0) return solve_trs_spectral(g, H, delta);

  double lam_lo = 0.0;
  double lam_hi = gnorm / delta + H.cwiseAbs().rowwise().sum().maxCoeff();
  double lam = 0.0;
  bool have_newton = false;

  {
    Eigen::LLT<Mat> llt(H);
    if (llt.info() == Eigen::Success) {
      const Vec n = solve_refined(llt, H, -g);
      const double nn = n.norm();
      if (nn <= delta * (1 + kBoundaryRtol))
        return pack(g, H, delta, n, 0.0, false);
      const Vec q = llt.matrixL().solve(n);
      lam = (nn * nn / q.squaredNorm()) * (nn - delta) / delta;
      have_newton = true;
    }
  }

  for (int it = 0; it < 100; ++it) {
    if (!have_newton || !std::isfinite(lam) || lam <= lam_lo || lam >= lam_hi)
      lam = safeguard(lam_lo, lam_hi);
    have_newton = false;

    Mat A = H;
    A.diagonal().array() += lam;
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success) {
      lam_lo = lam;  // λ* ≥ -λ₁(H) > lam
    } else {
      const Vec n = solve_refined(llt, A, -g);
      const double nn = n.norm();
      if (std::abs(nn - delta) <= kBoundaryRtol * delta)
        return pack(g, H, delta, n, lam, false);
      if (nn > delta)
        lam_lo = lam;
      else
        lam_hi = std::min(lam_hi, lam);
      const Vec q = llt.matrixL().solve(n);
      lam += (nn * nn / q.squaredNorm()) * (nn - delta) / delta;
      have_newton = true;
    }
    if (lam_hi - lam_lo <= 1e-12 * std::max(1.0, lam_hi)) break;  // hard case
  }
  return solve_trs_spectral(g, H, delta);
}

Vec solve_regularized(const Vec& g, const Mat& H, double lambda) {
  Mat A = 0.5 * (H + H.transpose());
  A.diagonal().array() += lambda;
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "solve_regularized: shifted matrix is not positive definite");
  return solve_refined(llt, A, -g);
}

NullBasis null_space_basis(const Mat& J) {
  const int N = static_cast<int>(J.cols());
  NullBasis nb;
  if (J.rows() == 0) {
    nb.Z = Mat::Identity(N, N);
    nb.rank = 0;
    return nb;
  }
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double tol = 1e-12 * (sv.size() ? sv[0] : 0.0) *
                     std::max<double>(J.rows(), J.cols());
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol && sv[i] > 0) ++rank;
  nb.rank = rank;
  nb.Z = svd.matrixV().rightCols(N - rank);
  return nb;
}

Vec projected_gradient(const Vec& g, const Mat& H, const Vec& n,
                       const NullBasis& basis) {
  const Vec w = g + H * n;
  return basis.Z * (basis.Z.transpose() * w);
}

TangentialSolution solve_tangential(const Vec& g, const Mat& H, const Mat& J,
                                    const Vec& n, double delta_s) {
  const NullBasis nb = null_space_basis(J);
  const Vec nN = nb.Z * (nb.Z.transpose() * n);
  const Vec nR = n - nN;
  const double r =
      std::sqrt(std::max(delta_s * delta_s - nR.squaredNorm(), 0.0));

  TangentialSolution ts;
  if (nb.Z.cols() == 0 || r <= 0.0) {
    ts.t = -nN;  // only reachable with nN ≈ 0; keeps s inside the ball
    ts.lambda_f = 0.0;
    ts.on_boundary = r <= 0.0;
  } else {
    const Vec g_red = nb.Z.transpose() * (g + H * nR);
    Mat H_red = nb.Z.transpose() * H * nb.Z;
    H_red = 0.5 * (H_red + H_red.transpose().eval());
    const TrsSolution red = solve_trs(g_red, H_red, r);
    ts.t = nb.Z * red.step - nN;
    ts.lambda_f = red.multiplier;
    ts.on_boundary = red.on_boundary;
  }

  if (J.rows() == 0) {
    ts.yf = Vec(0);
  } else {
    const Vec s = n + ts.t;
    const Vec rhs = -(g + H * s + ts.lambda_f * s);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(J.transpose());
    ts.yf = cod.solve(rhs);
  }
  return ts;
}

Vec solve_tangential_regularized(const Vec& g, const Mat& H, const Mat& J,
                                 const Vec& n, double lambda_f) {
  const NullBasis nb = null_space_basis(J);
  const Vec nN = nb.Z * (nb.Z.transpose() * n);
  if (nb.Z.cols() == 0) return -nN;
  const Vec nR = n - nN;
  const Vec g_red = nb.Z.transpose() * (g + H * nR);
  Mat H_red = nb.Z.transpose() * H * nb.Z;
  H_red = 0.5 * (H_red + H_red.transpose().eval());
  H_red.diagonal().array() += lambda_f;
  Eigen::LLT<Mat> llt(H_red);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "solve_tangential_regularized: reduced matrix is not positive "
        "definite");
  const Vec u = solve_refined(llt, H_red, -g_red);
  return nb.Z * u - nN;
}

std::pair<double, Vec> v_contract_lambda_search(const Vec& gv, const Mat& Hv,
                                                double lambda_v,
                                                double sigma_min,
                                                double sigma_max) {
  const double gn = gv.norm();
  if (!(gn > 0))
    throw std::invalid_argument("v_contract_lambda_search: zero gradient");

  double lhat = lambda_v + std::sqrt(sigma_min * gn);
  Vec nh;
  for (int k = 0;; ++k) {
    try {
      nh = solve_regularized(gv, Hv, lhat);
      break;
    } catch (const std::invalid_argument&) {
      if (k >= 64) throw;
      lhat = lambda_v + 2 * (lhat - lambda_v);
    }
  }
  if (lhat / nh.norm() <= sigma_max) return {lhat, nh};

  double lo = lambda_v, hi = lhat;
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    Vec nm;
    try {
      nm = solve_regularized(gv, Hv, mid);
    } catch (const std::invalid_argument&) {
      lo = mid;  // not PD ⇒ mid below the dual floor ⇒ ratio too small
      continue;
    }
    const double ratio = mid / nm.norm();
    if (ratio < sigma_min)
      lo = mid;
    else if (ratio > sigma_max)
      hi = mid;
    else
      return {mid, nm};
  }
  nh = solve_regularized(gv, Hv, hi);
  return {hi, nh};
}

std::pair<double, Vec> f_contract_lambda_search(const Vec& g, const Mat& H,
                                                const Mat& J, const Vec& n,
                                                double lambda_f,
                                                double sigma_min) {
  double lam = std::max(2 * lambda_f, sigma_min);
  for (int it = 0; it < 2000; ++it) {
    try {
      const Vec s = n + solve_tangential_regularized(g, H, J, n, lam);
      const double ns = s.norm();
      if (ns == 0.0 || lam / ns >= sigma_min) return {lam, s};
    } catch (const std::invalid_argument&) {
      // shifted reduced matrix still borderline; grow and retry
    }
    lam *= 2;
  }
  throw std::runtime_error("f_contract_lambda_search: no admissible shift");
}

}  // namespace funnel
