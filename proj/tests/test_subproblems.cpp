#include "funnel/subproblems.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_trs.hpp"

using namespace funnel;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat sym_random(int n, std::mt19937& rng, double shift) {
  std::normal_distribution<double> nd;
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
  Mat H = 0.5 * (A + A.transpose());
  H.diagonal().array() += shift;
  return H;
}

Vec randn(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

void check_against_oracle(const Vec& g, const Mat& H, double delta) {
  const TrsSolution got = solve_trs(g, H, delta);
  const oracle::TrsRef ref = oracle::solve_trs_reference(g, H, delta);

  CAPTURE(delta);
  CHECK(got.model_decrease ==
        doctest::Approx(ref.model_decrease)
            .epsilon(1e-8)
            .scale(std::max(1.0, std::abs(ref.model_decrease))));
  // the step itself may be non-unique; certify it instead of comparing it
  const auto kkt = oracle::trs_kkt_report(g, H, delta, got.step, got.multiplier);
  CHECK(kkt.stationarity <= 1e-8);
  CHECK(kkt.feasibility <= 1e-9);
  CHECK(kkt.complementarity <= 1e-6);
  CHECK(kkt.shift_psd <= 1e-8);
  CHECK(got.multiplier >= 0.0);
  const double recomputed = oracle::model_decrease_of(g, H, got.step);
  CHECK(got.model_decrease ==
        doctest::Approx(recomputed).epsilon(1e-12).scale(
            std::max(1.0, std::abs(recomputed))));
}

}  // namespace

TEST_CASE("trust-region step: interior Newton point") {
  const Vec g = vec2(1, 0);
  const Mat H = Mat::Identity(2, 2);
  const TrsSolution s = solve_trs(g, H, 10.0);
  CHECK(s.step[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.step[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.multiplier == doctest::Approx(0.0));
  CHECK(!s.on_boundary);
  CHECK(s.model_decrease == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("trust-region step: boundary solution via the secular equation") {
  // 1-D secular equation: ||-g/(1+lam)|| = 0.5 at lam = 1
  const TrsSolution s = solve_trs(vec2(1, 0), Mat::Identity(2, 2), 0.5);
  CHECK(s.step[0] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(s.step[1] == doctest::Approx(0.0));
  CHECK(s.multiplier == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.on_boundary);
}

TEST_CASE("trust-region step: hard case fills the leftmost eigenvector") {
  // g orthogonal to the negative-curvature direction
  Mat H = Mat::Zero(2, 2);
  H(0, 0) = -1;
  H(1, 1) = 1;
  const Vec g = vec2(0, 1);
  const double delta = 2.0;
  const TrsSolution s = solve_trs(g, H, delta);
  CHECK(s.hard_case);
  CHECK(s.multiplier == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(s.step[0]) == doctest::Approx(std::sqrt(3.75)).epsilon(1e-10));
  CHECK(s.step[1] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(s.step.norm() == doctest::Approx(2.0).epsilon(1e-10));
  check_against_oracle(g, H, delta);
}

TEST_CASE("trust-region step: zero gradient") {
  SUBCASE("positive definite: stay put") {
    const TrsSolution s = solve_trs(Vec::Zero(2), Mat::Identity(2, 2), 1.0);
    CHECK(s.step.norm() == 0.0);
    CHECK(s.multiplier == 0.0);
  }
  SUBCASE("indefinite: ride the negative curvature to the boundary") {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = -2;
    H(1, 1) = 1;
    const TrsSolution s = solve_trs(Vec::Zero(2), H, 1.0);
    CHECK(s.step.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.multiplier == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(s.model_decrease == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("trust-region step: rejects a non-positive radius") {
  CHECK_THROWS_AS(solve_trs(vec2(1, 0), Mat::Identity(2, 2), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_trs(vec2(1, 0), Mat::Identity(2, 2), -1.0),
                  std::invalid_argument);
}

TEST_CASE("trust-region step agrees with the spectral reference oracle") {
  std::mt19937 rng(20260817);
  std::uniform_int_distribution<int> dim(2, 6);
  std::uniform_real_distribution<double> rad(1e-3, 10.0);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);

  for (int trial = 0; trial < 60; ++trial) {
    const int n = dim(rng);
    const Mat H = sym_random(n, rng, shift(rng));
    const Vec g = randn(n, rng);
    check_against_oracle(g, H, rad(rng));
  }
}

TEST_CASE("trust-region step: engineered hard cases agree with the oracle") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(2, 6);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = dim(rng);
    // random orthogonal basis via QR of a Gaussian matrix
    Mat A(n, n);
    for (int i = 0; i < n; ++i) A.row(i) = randn(n, rng).transpose();
    const Mat Q = Eigen::HouseholderQR<Mat>(A).householderQ();
    Vec d(n);
    d[0] = -2.0;
    for (int i = 1; i < n; ++i) d[i] = -1.0 + i;
    const Mat H = Q * d.asDiagonal() * Q.transpose();
    // gradient with no component along the leftmost eigenvector
    Vec b = randn(n, rng);
    b[0] = 0.0;
    const Vec g = Q * b;
    // big enough radius that the pseudo-step fits: genuine hard case
    check_against_oracle(g, H, 50.0);
  }
}

TEST_CASE("regularized solve") {
  SUBCASE("diagonal example") {
    const Vec n = solve_regularized(vec2(2, 0), Mat::Identity(2, 2), 1.0);
    CHECK(n[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(n[1] == doctest::Approx(0.0));
  }
  SUBCASE("zero gradient") {
    CHECK(solve_regularized(Vec::Zero(3), Mat::Identity(3, 3), 0.5).norm() ==
          0.0);
  }
  SUBCASE("indefinite H shifted into the PD range") {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = -1;
    H(1, 1) = 1;
    const Vec n = solve_regularized(vec2(1, 1), H, 2.0);
    CHECK(n[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(n[1] == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  }
  SUBCASE("insufficient shift is a precondition violation") {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = -2;
    H(1, 1) = 1;
    CHECK_THROWS_AS(solve_regularized(vec2(1, 1), H, 1.0),
                    std::invalid_argument);
  }
  SUBCASE("||n(lambda)|| is nonincreasing in lambda") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
      const Mat H = sym_random(4, rng, 0.0);
      const Vec g = randn(4, rng);
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      const double lam0 = std::max(0.0, -es.eigenvalues()[0]) + 0.1;
      double prev = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 10; ++i) {
        const double lam = lam0 + 0.7 * i;
        const double nn = solve_regularized(g, H, lam).norm();
        CHECK(nn <= prev * (1 + 1e-12));
        prev = nn;
      }
    }
  }
}

TEST_CASE("null-space basis") {
  SUBCASE("single axis-aligned row") {
    Mat J(1, 2);
    J << 1, 0;
    const NullBasis nb = null_space_basis(J);
    CHECK(nb.rank == 1);
    REQUIRE(nb.Z.cols() == 1);
    CHECK(std::abs(nb.Z(1, 0)) == doctest::Approx(1.0));
    CHECK((J * nb.Z).norm() <= 1e-14);
  }
  SUBCASE("square full rank leaves nothing") {
    const NullBasis nb = null_space_basis(Mat::Identity(2, 2));
    CHECK(nb.rank == 2);
    CHECK(nb.Z.cols() == 0);
  }
  SUBCASE("rank-deficient rows collapse") {
    Mat J(2, 2);
    J << 1, 0, 2, 0;
    const NullBasis nb = null_space_basis(J);
    CHECK(nb.rank == 1);
    REQUIRE(nb.Z.cols() == 1);
    CHECK((J * nb.Z).norm() <= 1e-12);
  }
  SUBCASE("no rows at all spans everything") {
    const NullBasis nb = null_space_basis(Mat(0, 3));
    CHECK(nb.rank == 0);
    CHECK(nb.Z.cols() == 3);
    CHECK((nb.Z.transpose() * nb.Z - Mat::Identity(3, 3)).norm() <= 1e-14);
  }
  SUBCASE("random 3x5 full rank") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      Mat J(3, 5);
      for (int i = 0; i < 3; ++i) J.row(i) = randn(5, rng).transpose();
      const NullBasis nb = null_space_basis(J);
      REQUIRE(nb.rank == 3);
      REQUIRE(nb.Z.cols() == 2);
      CHECK((J * nb.Z).norm() <= 1e-10 * J.norm());
      CHECK((nb.Z.transpose() * nb.Z - Mat::Identity(2, 2)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("projected gradient") {
  Mat J(1, 2);
  J << 1, 0;
  const NullBasis nb = null_space_basis(J);

  SUBCASE("coordinate projection") {
    // g + Hn = (3,4) projected onto Null(J) = span(e2)
    const Vec gp =
        projected_gradient(vec2(3, 4), Mat::Zero(2, 2), Vec::Zero(2), nb);
    CHECK(gp[0] == doctest::Approx(0.0));
    CHECK(gp[1] == doctest::Approx(4.0));
  }
  SUBCASE("range-space vectors vanish") {
    const Vec gp =
        projected_gradient(vec2(7, 0), Mat::Zero(2, 2), Vec::Zero(2), nb);
    CHECK(gp.norm() <= 1e-14);
  }
  SUBCASE("no constraints, no projection") {
    const NullBasis full = null_space_basis(Mat(0, 2));
    const Vec g = vec2(3, 4);
    const Mat H = Mat::Identity(2, 2);
    const Vec n = vec2(1, 1);
    const Vec gp = projected_gradient(g, H, n, full);
    CHECK((gp - (g + H * n)).norm() <= 1e-14);
  }
}

TEST_CASE("tangential step: reduced trust region on the null space") {
  Mat J(1, 2);
  J << 1, 0;
  const Mat H = Mat::Identity(2, 2);

  SUBCASE("worked 1-D reduction lands on the reduced boundary") {
    // reduced problem: min tau + tau^2/2 over |tau| <= sqrt(0.99); the
    // unconstrained minimizer tau = -1 does NOT fit, so the solution is
    // tau = -sqrt(0.99) with multiplier 1/sqrt(0.99) - 1
    const Vec n = vec2(0.1, 0);
    const TangentialSolution ts = solve_tangential(vec2(1, 1), H, J, n, 1.0);
    const double root = std::sqrt(0.99);
    CHECK(ts.t[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ts.t[1] == doctest::Approx(-root).epsilon(1e-10));
    CHECK(ts.lambda_f == doctest::Approx(1.0 / root - 1.0).epsilon(1e-8));
    CHECK(ts.on_boundary);
    CHECK((n + ts.t).norm() == doctest::Approx(1.0).epsilon(1e-10));
    // dual feasibility of the shifted system restricted to Range(J')
    const Vec s = n + ts.t;
    const Vec grad = vec2(1, 1) + H * s + ts.lambda_f * s;
    CHECK((grad + J.transpose() * ts.yf).norm() <= 1e-8);
    CHECK(ts.yf[0] == doctest::Approx(-(1.0 + 0.1 / root)).epsilon(1e-8));
  }
  SUBCASE("stationary reduced gradient recenters only") {
    // g = -Hn makes g + Hn = 0; with n in Range(J') the step is zero
    const Vec n = vec2(0.3, 0);
    const Vec g = -(H * n);
    const TangentialSolution ts = solve_tangential(g, H, J, n, 1.0);
    CHECK(ts.t.norm() <= 1e-12);
    CHECK(ts.lambda_f == doctest::Approx(0.0));
  }
  SUBCASE("square Jacobian leaves no tangential freedom") {
    const Vec n = vec2(0.1, 0.2);
    const TangentialSolution ts =
        solve_tangential(vec2(1, 1), H, Mat::Identity(2, 2), n, 1.0);
    CHECK(ts.t.norm() == 0.0);
    CHECK(ts.lambda_f == 0.0);
    // yf absorbs the whole shifted gradient: residual zero for square J
    const Vec grad = vec2(1, 1) + H * n;
    CHECK((grad + Mat::Identity(2, 2) * ts.yf).norm() <= 1e-12);
  }
  SUBCASE("Jt = 0 always") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      Mat Jr(2, 5);
      for (int i = 0; i < 2; ++i) Jr.row(i) = randn(5, rng).transpose();
      const Mat Hr = sym_random(5, rng, 1.5);
      Vec nr = randn(5, rng);
      nr *= 0.4 / nr.norm();
      const TangentialSolution ts =
          solve_tangential(randn(5, rng), Hr, Jr, nr, 1.0);
      CHECK((Jr * ts.t).norm() <= 1e-10 * std::max(1.0, Jr.norm()));
      CHECK((nr + ts.t).norm() <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("tangential step with a prescribed multiplier") {
  Mat J(1, 2);
  J << 1, 0;
  const Mat H = Mat::Identity(2, 2);
  const Vec n = vec2(0.1, 0);

  SUBCASE("worked example") {
    const Vec t = solve_tangential_regularized(vec2(1, 1), H, J, n, 1.0);
    CHECK(t[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("square Jacobian gives zero") {
    const Vec t = solve_tangential_regularized(vec2(1, 1), H,
                                               Mat::Identity(2, 2), n, 1.0);
    CHECK(t.norm() == 0.0);
  }
  SUBCASE("indefinite reduced matrix is a precondition violation") {
    Mat Hn = Mat::Zero(2, 2);
    Hn(0, 0) = 1;
    Hn(1, 1) = -3;
    CHECK_THROWS_AS(solve_tangential_regularized(vec2(1, 1), Hn, J, n, 1.0),
                    std::invalid_argument);
  }
  SUBCASE("||n + t(lambda)|| decreases toward ||n_range||") {
    std::mt19937 rng(17);
    Mat Jr(1, 4);
    Jr.row(0) = randn(4, rng).transpose();
    Mat B(4, 4);
    for (int i = 0; i < 4; ++i) B.row(i) = randn(4, rng).transpose();
    const Mat Hr = B * B.transpose() + 0.1 * Mat::Identity(4, 4);
    Vec nr = randn(4, rng);
    nr *= 0.3 / nr.norm();
    const Vec gr = randn(4, rng);
    const NullBasis nb = null_space_basis(Jr);
    const Vec nR = nr - nb.Z * (nb.Z.transpose() * nr);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
      const double lam = 0.2 * std::pow(2.5, i);
      const double ns =
          (nr + solve_tangential_regularized(gr, Hr, Jr, nr, lam)).norm();
      CHECK(ns <= prev * (1 + 1e-12));
      prev = ns;
    }
    CHECK(prev >= nR.norm() * (1 - 1e-9));
  }
}

TEST_CASE("normal-multiplier search") {
  SUBCASE("direct lhat evaluation") {
    const auto [lam, n] = v_contract_lambda_search(
        vec2(1, 0), Mat::Identity(2, 2), 0.0, 1e-12, 1e20);
    CHECK(lam == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(n[0] == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(n[1] == doctest::Approx(0.0));
    const double ratio = lam / n.norm();
    CHECK(ratio >= 1e-12);
    CHECK(ratio <= 1e20);
  }
  SUBCASE("tight sigma_max forces the bisection branch") {
    // 1-D: phi(lam) = lam*(1+lam) is strictly increasing; force a search by
    // capping the ratio below phi(lhat)
    Mat H(1, 1);
    H << 1;
    Vec g(1);
    g << 1;
    const double sigma_min = 1e-12, sigma_max = 5e-7;
    const auto [lam, n] = v_contract_lambda_search(g, H, 0.0, sigma_min,
                                                   sigma_max);
    const double ratio = lam / n.norm();
    CHECK(ratio >= sigma_min);
    CHECK(ratio <= sigma_max);
    // analytic check: ratio = lam*(1+lam)
    CHECK(ratio == doctest::Approx(lam * (1 + lam)).epsilon(1e-9));
  }
  SUBCASE("zero gradient rejected") {
    CHECK_THROWS_AS(v_contract_lambda_search(Vec::Zero(2),
                                             Mat::Identity(2, 2), 0.0, 1e-12,
                                             1e20),
                    std::invalid_argument);
  }
}

TEST_CASE("objective-multiplier search") {
  SUBCASE("square Jacobian: ratio crosses sigma_min immediately") {
    const Vec n = vec2(1, 0);
    const auto [lam, s] = f_contract_lambda_search(
        vec2(1, 1), Mat::Identity(2, 2), Mat::Identity(2, 2), n, 0.0, 1e-12);
    CHECK((s - n).norm() == 0.0);  // t = 0: no tangential freedom
    CHECK(lam / s.norm() >= 1e-12);
    CHECK(lam == doctest::Approx(1e-12));
  }
  SUBCASE("1-D reduced model matches the closed form") {
    Mat J(1, 2);
    J << 1, 0;
    const Vec n = vec2(0.1, 0);
    const auto [lam, s] = f_contract_lambda_search(
        vec2(1, 1), Mat::Identity(2, 2), J, n, 0.0, 1e-12);
    // s = n + t(lam) = (0.1, -1/(1+lam)) for this data
    CHECK(s[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(-1.0 / (1.0 + lam)).epsilon(1e-8));
    CHECK(lam / s.norm() >= 1e-12);
    CHECK(lam == doctest::Approx(2e-12));
  }
}
