#include "funnel/corpus.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace funnel {

namespace {

Mat Z(int n) { return Mat::Zero(n, n); }

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const double SQ2 = std::sqrt(2.0);

// ---------------------------------------------------------------- 2 variables

NlpProblem maratos() {
  NlpProblem p;
  p.name = "MARATOS";
  p.n_vars = 2;
  p.n_cons = 1;
  p.x0 = vec({1.1, 0.1});
  p.known_fopt = -1.0;
  p.eval_f = [](const Vec& x) {
    return 2.0 * (x[0] * x[0] + x[1] * x[1] - 1.0) - x[0];
  };
  p.eval_g = [](const Vec& x) { return vec({4 * x[0] - 1, 4 * x[1]}); };
  p.eval_hess_f = [](const Vec&) {
    Mat h = Z(2);
    h(0, 0) = h(1, 1) = 4;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * x[0] + x[1] * x[1] - 1.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(1, 2);
    J << 2 * x[0], 2 * x[1];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int) {
    Mat h = Z(2);
    h(0, 0) = h(1, 1) = 2;
    return h;
  };
  return p;
}

NlpProblem hs6() {
  NlpProblem p;
  p.name = "HS6";
  p.n_vars = 2;
  p.n_cons = 1;
  p.x0 = vec({-1.2, 1.0});
  p.known_fopt = 0.0;
  p.eval_f = [](const Vec& x) { return (1 - x[0]) * (1 - x[0]); };
  p.eval_g = [](const Vec& x) { return vec({-2 * (1 - x[0]), 0.0}); };
  p.eval_hess_f = [](const Vec&) {
    Mat h = Z(2);
    h(0, 0) = 2;
    return h;
  };
  p.eval_c = [](const Vec& x) { return vec({10 * (x[1] - x[0] * x[0])}); };
  p.eval_J = [](const Vec& x) {
    Mat J(1, 2);
    J << -20 * x[0], 10;
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int) {
    Mat h = Z(2);
    h(0, 0) = -20;
    return h;
  };
  return p;
}

NlpProblem hs7() {
  NlpProblem p;
  p.name = "HS7";
  p.n_vars = 2;
  p.n_cons = 1;
  p.x0 = vec({2.0, 2.0});
  p.known_fopt = -std::sqrt(3.0);
  p.eval_f = [](const Vec& x) {
    return std::log(1 + x[0] * x[0]) - x[1];
  };
  p.eval_g = [](const Vec& x) {
    return vec({2 * x[0] / (1 + x[0] * x[0]), -1.0});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(2);
    const double u = 1 + x[0] * x[0];
    h(0, 0) = 2 * (1 - x[0] * x[0]) / (u * u);
    return h;
  };
  p.eval_c = [](const Vec& x) {
    const double u = 1 + x[0] * x[0];
    return vec({u * u + x[1] * x[1] - 4.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(1, 2);
    J << 4 * x[0] * (1 + x[0] * x[0]), 2 * x[1];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int) {
    Mat h = Z(2);
    h(0, 0) = 4 + 12 * x[0] * x[0];
    h(1, 1) = 2;
    return h;
  };
  return p;
}

NlpProblem bt10() {
  NlpProblem p;
  p.name = "BT10";
  p.n_vars = 2;
  p.n_cons = 2;
  p.x0 = vec({2.0, 2.0});
  p.known_fopt = -1.0;
  p.eval_f = [](const Vec& x) { return -x[0]; };
  p.eval_g = [](const Vec&) { return vec({-1.0, 0.0}); };
  p.eval_hess_f = [](const Vec&) { return Z(2); };
  p.eval_c = [](const Vec& x) {
    return vec({x[1] - x[0] * x[0] * x[0], x[0] * x[0] - x[1]});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(2, 2);
    J << -3 * x[0] * x[0], 1, 2 * x[0], -1;
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int i) {
    Mat h = Z(2);
    h(0, 0) = i == 0 ? -6 * x[0] : 2;
    return h;
  };
  return p;
}

NlpProblem bt1() {
  NlpProblem p;
  p.name = "BT1";
  p.n_vars = 2;
  p.n_cons = 1;
  p.x0 = vec({0.08, 0.06});
  p.known_fopt = -1.0;
  p.eval_f = [](const Vec& x) {
    return 100 * (x[0] * x[0] + x[1] * x[1]) - x[0] - 100;
  };
  p.eval_g = [](const Vec& x) { return vec({200 * x[0] - 1, 200 * x[1]}); };
  p.eval_hess_f = [](const Vec&) {
    Mat h = Z(2);
    h(0, 0) = h(1, 1) = 200;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * x[0] + x[1] * x[1] - 1.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(1, 2);
    J << 2 * x[0], 2 * x[1];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int) {
    Mat h = Z(2);
    h(0, 0) = h(1, 1) = 2;
    return h;
  };
  return p;
}

// ---------------------------------------------------------------- 3 variables

NlpProblem hs27() {
  NlpProblem p;
  p.name = "HS27";
  p.n_vars = 3;
  p.n_cons = 1;
  p.x0 = vec({2.0, 2.0, 2.0});
  p.known_fopt = 0.04;
  p.eval_f = [](const Vec& x) {
    const double a = x[0] - 1, b = x[1] - x[0] * x[0];
    return 0.01 * a * a + b * b;
  };
  p.eval_g = [](const Vec& x) {
    const double b = x[1] - x[0] * x[0];
    return vec({0.02 * (x[0] - 1) - 4 * x[0] * b, 2 * b, 0.0});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(3);
    h(0, 0) = 0.02 - 4 * x[1] + 12 * x[0] * x[0];
    h(0, 1) = h(1, 0) = -4 * x[0];
    h(1, 1) = 2;
    return h;
  };
  p.eval_c = [](const Vec& x) { return vec({x[0] + x[2] * x[2] + 1.0}); };
  p.eval_J = [](const Vec& x) {
    Mat J(1, 3);
    J << 1, 0, 2 * x[2];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int) {
    Mat h = Z(3);
    h(2, 2) = 2;
    return h;
  };
  return p;
}

NlpProblem bt2() {
  NlpProblem p;
  p.name = "BT2";
  p.n_vars = 3;
  p.n_cons = 1;
  p.x0 = vec({10.0, 10.0, 10.0});
  p.known_fopt = 0.032568200;
  p.eval_f = [](const Vec& x) {
    const double a = x[0] - 1, b = x[0] - x[1], c = x[1] - x[2];
    return a * a + b * b + c * c * c * c;
  };
  p.eval_g = [](const Vec& x) {
    const double b = x[0] - x[1], c = x[1] - x[2];
    return vec({2 * (x[0] - 1) + 2 * b, -2 * b + 4 * c * c * c,
                -4 * c * c * c});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(3);
    const double c2 = 12 * (x[1] - x[2]) * (x[1] - x[2]);
    h(0, 0) = 4;
    h(0, 1) = h(1, 0) = -2;
    h(1, 1) = 2 + c2;
    h(1, 2) = h(2, 1) = -c2;
    h(2, 2) = c2;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * (1 + x[1] * x[1]) + std::pow(x[2], 4) - 4 - 3 * SQ2});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(1, 3);
    J << 1 + x[1] * x[1], 2 * x[0] * x[1], 4 * x[2] * x[2] * x[2];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int) {
    Mat h = Z(3);
    h(0, 1) = h(1, 0) = 2 * x[1];
    h(1, 1) = 2 * x[0];
    h(2, 2) = 12 * x[2] * x[2];
    return h;
  };
  return p;
}

NlpProblem bt4() {
  NlpProblem p;
  p.name = "BT4";
  p.n_vars = 3;
  p.n_cons = 2;
  p.x0 = vec({3.1494, 1.4523, -3.6017});
  p.known_fopt = -45.51055074;
  p.eval_f = [](const Vec& x) {
    return x[0] - x[1] + x[1] * x[1] * x[1];
  };
  p.eval_g = [](const Vec& x) {
    return vec({1.0, -1 + 3 * x[1] * x[1], 0.0});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(3);
    h(1, 1) = 6 * x[1];
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x.squaredNorm() - 25.0, x.sum() - 1.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(2, 3);
    J.row(0) = 2 * x.transpose();
    J.row(1).setOnes();
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int i) {
    return i == 0 ? Mat(2 * Mat::Identity(3, 3)) : Z(3);
  };
  return p;
}

NlpProblem bt5() {
  NlpProblem p;
  p.name = "BT5";
  p.n_vars = 3;
  p.n_cons = 2;
  p.x0 = vec({2.0, 2.0, 2.0});
  p.known_fopt = 961.71517219;
  p.eval_f = [](const Vec& x) {
    return 1000 - x[0] * x[0] - 2 * x[1] * x[1] - x[2] * x[2] -
           x[0] * x[1] - x[0] * x[2];
  };
  p.eval_g = [](const Vec& x) {
    return vec({-2 * x[0] - x[1] - x[2], -4 * x[1] - x[0],
                -2 * x[2] - x[0]});
  };
  p.eval_hess_f = [](const Vec&) {
    Mat h(3, 3);
    h << -2, -1, -1, -1, -4, 0, -1, 0, -2;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x.squaredNorm() - 25.0,
                8 * x[0] + 14 * x[1] + 7 * x[2] - 56});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(2, 3);
    J.row(0) = 2 * x.transpose();
    J.row(1) << 8, 14, 7;
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int i) {
    return i == 0 ? Mat(2 * Mat::Identity(3, 3)) : Z(3);
  };
  return p;
}

NlpProblem byrdsphr() {
  NlpProblem p;
  p.name = "BYRDSPHR";
  p.n_vars = 3;
  p.n_cons = 2;
  p.x0 = vec({5.0, 0.0001, -0.0001});
  p.known_fopt = -0.5 - std::sqrt(17.5);
  p.eval_f = [](const Vec& x) { return -x[0] - x[1] - x[2]; };
  p.eval_g = [](const Vec&) { return vec({-1.0, -1.0, -1.0}); };
  p.eval_hess_f = [](const Vec&) { return Z(3); };
  p.eval_c = [](const Vec& x) {
    const double s = x[1] * x[1] + x[2] * x[2];
    return vec({x[0] * x[0] + s - 9.0, (x[0] - 1) * (x[0] - 1) + s - 9.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(2, 3);
    J << 2 * x[0], 2 * x[1], 2 * x[2], 2 * (x[0] - 1), 2 * x[1], 2 * x[2];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int) {
    return Mat(2 * Mat::Identity(3, 3));
  };
  return p;
}

// ---------------------------------------------------------------- 4 variables

NlpProblem hs39_like(const char* name) {
  NlpProblem p;
  p.name = name;
  p.n_vars = 4;
  p.n_cons = 2;
  p.x0 = vec({2.0, 2.0, 2.0, 2.0});
  p.known_fopt = -1.0;
  p.eval_f = [](const Vec& x) { return -x[0]; };
  p.eval_g = [](const Vec&) { return vec({-1.0, 0.0, 0.0, 0.0}); };
  p.eval_hess_f = [](const Vec&) { return Z(4); };
  p.eval_c = [](const Vec& x) {
    return vec({x[1] - x[0] * x[0] * x[0] - x[2] * x[2],
                x[0] * x[0] - x[1] - x[3] * x[3]});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(2, 4);
    J << -3 * x[0] * x[0], 1, -2 * x[2], 0, 2 * x[0], -1, 0, -2 * x[3];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int i) {
    Mat h = Z(4);
    if (i == 0) {
      h(0, 0) = -6 * x[0];
      h(2, 2) = -2;
    } else {
      h(0, 0) = 2;
      h(3, 3) = -2;
    }
    return h;
  };
  return p;
}

NlpProblem hs40() {
  NlpProblem p;
  p.name = "HS40";
  p.n_vars = 4;
  p.n_cons = 3;
  p.x0 = vec({0.8, 0.8, 0.8, 0.8});
  p.known_fopt = -0.25;
  p.eval_f = [](const Vec& x) { return -x[0] * x[1] * x[2] * x[3]; };
  p.eval_g = [](const Vec& x) {
    return vec({-x[1] * x[2] * x[3], -x[0] * x[2] * x[3],
                -x[0] * x[1] * x[3], -x[0] * x[1] * x[2]});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        double prod = -1.0;
        for (int k = 0; k < 4; ++k)
          if (k != i && k != j) prod *= x[k];
        h(i, j) = h(j, i) = prod;
      }
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * x[0] * x[0] + x[1] * x[1] - 1.0,
                x[0] * x[0] * x[3] - x[2], x[3] * x[3] - x[1]});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(3, 4);
    J << 3 * x[0] * x[0], 2 * x[1], 0, 0,
         2 * x[0] * x[3], 0, -1, x[0] * x[0],
         0, -1, 0, 2 * x[3];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int i) {
    Mat h = Z(4);
    if (i == 0) {
      h(0, 0) = 6 * x[0];
      h(1, 1) = 2;
    } else if (i == 1) {
      h(0, 0) = 2 * x[3];
      h(0, 3) = h(3, 0) = 2 * x[0];
    } else {
      h(3, 3) = 2;
    }
    return h;
  };
  return p;
}

NlpProblem hs42() {
  NlpProblem p;
  p.name = "HS42";
  p.n_vars = 4;
  p.n_cons = 2;
  p.x0 = vec({1.0, 1.0, 1.0, 1.0});
  p.known_fopt = 28.0 - 10.0 * SQ2;
  p.eval_f = [](const Vec& x) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (x[i] - (i + 1)) * (x[i] - (i + 1));
    return s;
  };
  p.eval_g = [](const Vec& x) {
    Vec g(4);
    for (int i = 0; i < 4; ++i) g[i] = 2 * (x[i] - (i + 1));
    return g;
  };
  p.eval_hess_f = [](const Vec&) { return Mat(2 * Mat::Identity(4, 4)); };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] - 2.0, x[2] * x[2] + x[3] * x[3] - 2.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J(2, 4);
    J << 1, 0, 0, 0, 0, 0, 2 * x[2], 2 * x[3];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int i) {
    Mat h = Z(4);
    if (i == 1) h(2, 2) = h(3, 3) = 2;
    return h;
  };
  return p;
}

// ---------------------------------------------------------------- 5 variables

NlpProblem hs52_like(const char* name, bool hs52) {
  // Same linear constraints; the two objectives differ in the first term
  // ((4x1-x2)^2 vs (x1-x2)^2).
  NlpProblem p;
  p.name = name;
  p.n_vars = 5;
  p.n_cons = 3;
  p.x0 = vec({2.0, 2.0, 2.0, 2.0, 2.0});
  p.known_fopt = hs52 ? 1859.0 / 349.0 : 4.093023256;
  const double a = hs52 ? 4.0 : 1.0;
  p.eval_f = [a](const Vec& x) {
    const double t1 = a * x[0] - x[1], t2 = x[1] + x[2] - 2, t3 = x[3] - 1,
                 t4 = x[4] - 1;
    return t1 * t1 + t2 * t2 + t3 * t3 + t4 * t4;
  };
  p.eval_g = [a](const Vec& x) {
    const double t1 = a * x[0] - x[1], t2 = x[1] + x[2] - 2;
    return vec({2 * a * t1, -2 * t1 + 2 * t2, 2 * t2, 2 * (x[3] - 1),
                2 * (x[4] - 1)});
  };
  p.eval_hess_f = [a](const Vec&) {
    Mat h = Z(5);
    h(0, 0) = 2 * a * a;
    h(0, 1) = h(1, 0) = -2 * a;
    h(1, 1) = 4;
    h(1, 2) = h(2, 1) = 2;
    h(2, 2) = 2;
    h(3, 3) = h(4, 4) = 2;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] + 3 * x[1], x[2] + x[3] - 2 * x[4], x[1] - x[4]});
  };
  p.eval_J = [](const Vec&) {
    Mat J(3, 5);
    J << 1, 3, 0, 0, 0, 0, 0, 1, 1, -2, 0, 1, 0, 0, -1;
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int) { return Z(5); };
  return p;
}

NlpProblem hs77_like(const char* name) {
  NlpProblem p;
  p.name = name;
  p.n_vars = 5;
  p.n_cons = 2;
  p.x0 = vec({2.0, 2.0, 2.0, 2.0, 2.0});
  p.known_fopt = 0.24150513;
  p.eval_f = [](const Vec& x) {
    const double a = x[0] - 1, b = x[0] - x[1], c = x[2] - 1, d = x[3] - 1,
                 e = x[4] - 1;
    return a * a + b * b + c * c + std::pow(d, 4) + std::pow(e, 6);
  };
  p.eval_g = [](const Vec& x) {
    const double b = x[0] - x[1], d = x[3] - 1, e = x[4] - 1;
    return vec({2 * (x[0] - 1) + 2 * b, -2 * b, 2 * (x[2] - 1),
                4 * d * d * d, 6 * std::pow(e, 5)});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(5);
    h(0, 0) = 4;
    h(0, 1) = h(1, 0) = -2;
    h(1, 1) = 2;
    h(2, 2) = 2;
    h(3, 3) = 12 * (x[3] - 1) * (x[3] - 1);
    h(4, 4) = 30 * std::pow(x[4] - 1, 4);
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * x[0] * x[3] + std::sin(x[3] - x[4]) - 2 * SQ2,
                x[1] + std::pow(x[2], 4) * x[3] * x[3] - 8 - SQ2});
  };
  p.eval_J = [](const Vec& x) {
    Mat J = Mat::Zero(2, 5);
    J(0, 0) = 2 * x[0] * x[3];
    J(0, 3) = x[0] * x[0] + std::cos(x[3] - x[4]);
    J(0, 4) = -std::cos(x[3] - x[4]);
    J(1, 1) = 1;
    J(1, 2) = 4 * std::pow(x[2], 3) * x[3] * x[3];
    J(1, 3) = 2 * std::pow(x[2], 4) * x[3];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int i) {
    Mat h = Z(5);
    if (i == 0) {
      const double s = std::sin(x[3] - x[4]);
      h(0, 0) = 2 * x[3];
      h(0, 3) = h(3, 0) = 2 * x[0];
      h(3, 3) = -s;
      h(3, 4) = h(4, 3) = s;
      h(4, 4) = -s;
    } else {
      h(2, 2) = 12 * x[2] * x[2] * x[3] * x[3];
      h(2, 3) = h(3, 2) = 8 * std::pow(x[2], 3) * x[3];
      h(3, 3) = 2 * std::pow(x[2], 4);
    }
    return h;
  };
  return p;
}

NlpProblem hs78() {
  NlpProblem p;
  p.name = "HS78";
  p.n_vars = 5;
  p.n_cons = 3;
  p.x0 = vec({-2.0, 1.5, 2.0, -1.0, -1.0});
  p.known_fopt = -2.91970041;
  p.eval_f = [](const Vec& x) {
    return x[0] * x[1] * x[2] * x[3] * x[4];
  };
  p.eval_g = [](const Vec& x) {
    Vec g(5);
    for (int i = 0; i < 5; ++i) {
      double prod = 1.0;
      for (int k = 0; k < 5; ++k)
        if (k != i) prod *= x[k];
      g[i] = prod;
    }
    return g;
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(5);
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) {
        double prod = 1.0;
        for (int k = 0; k < 5; ++k)
          if (k != i && k != j) prod *= x[k];
        h(i, j) = h(j, i) = prod;
      }
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x.squaredNorm() - 10.0, x[1] * x[2] - 5 * x[3] * x[4],
                x[0] * x[0] * x[0] + x[1] * x[1] * x[1] + 1.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J = Mat::Zero(3, 5);
    J.row(0) = 2 * x.transpose();
    J(1, 1) = x[2];
    J(1, 2) = x[1];
    J(1, 3) = -5 * x[4];
    J(1, 4) = -5 * x[3];
    J(2, 0) = 3 * x[0] * x[0];
    J(2, 1) = 3 * x[1] * x[1];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int i) {
    Mat h = Z(5);
    if (i == 0) {
      h = 2 * Mat::Identity(5, 5);
    } else if (i == 1) {
      h(1, 2) = h(2, 1) = 1;
      h(3, 4) = h(4, 3) = -5;
    } else {
      h(0, 0) = 6 * x[0];
      h(1, 1) = 6 * x[1];
    }
    return h;
  };
  return p;
}

NlpProblem hs79_like(const char* name) {
  NlpProblem p;
  p.name = name;
  p.n_vars = 5;
  p.n_cons = 3;
  p.x0 = vec({2.0, 2.0, 2.0, 2.0, 2.0});
  p.known_fopt = 0.078776821;
  p.eval_f = [](const Vec& x) {
    const double a = x[0] - 1, b = x[0] - x[1], c = x[1] - x[2],
                 d = x[2] - x[3], e = x[3] - x[4];
    return a * a + b * b + c * c + std::pow(d, 4) + std::pow(e, 4);
  };
  p.eval_g = [](const Vec& x) {
    const double b = x[0] - x[1], c = x[1] - x[2], d = x[2] - x[3],
                 e = x[3] - x[4];
    return vec({2 * (x[0] - 1) + 2 * b, -2 * b + 2 * c,
                -2 * c + 4 * d * d * d, -4 * d * d * d + 4 * e * e * e,
                -4 * e * e * e});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(5);
    const double d2 = 12 * (x[2] - x[3]) * (x[2] - x[3]);
    const double e2 = 12 * (x[3] - x[4]) * (x[3] - x[4]);
    h(0, 0) = 4;
    h(0, 1) = h(1, 0) = -2;
    h(1, 1) = 4;
    h(1, 2) = h(2, 1) = -2;
    h(2, 2) = 2 + d2;
    h(2, 3) = h(3, 2) = -d2;
    h(3, 3) = d2 + e2;
    h(3, 4) = h(4, 3) = -e2;
    h(4, 4) = e2;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] + x[1] * x[1] + std::pow(x[2], 3) - 2 - 3 * SQ2,
                x[1] - x[2] * x[2] + x[3] + 2 - 2 * SQ2,
                x[0] * x[4] - 2.0});
  };
  p.eval_J = [](const Vec& x) {
    Mat J = Mat::Zero(3, 5);
    J(0, 0) = 1;
    J(0, 1) = 2 * x[1];
    J(0, 2) = 3 * x[2] * x[2];
    J(1, 1) = 1;
    J(1, 2) = -2 * x[2];
    J(1, 3) = 1;
    J(2, 0) = x[4];
    J(2, 4) = x[0];
    return J;
  };
  p.eval_hess_ci = [](const Vec& x, int i) {
    Mat h = Z(5);
    if (i == 0) {
      h(1, 1) = 2;
      h(2, 2) = 6 * x[2];
    } else if (i == 1) {
      h(2, 2) = -2;
    } else {
      h(0, 4) = h(4, 0) = 1;
    }
    return h;
  };
  return p;
}

NlpProblem bt7() {
  NlpProblem p;
  p.name = "BT7";
  p.n_vars = 5;
  p.n_cons = 3;
  p.x0 = vec({-2.0, 1.0, 1.0, 1.0, 1.0});
  p.known_fopt = 306.5;
  p.eval_f = [](const Vec& x) {
    const double a = x[1] - x[0] * x[0], b = x[0] - 1;
    return 100 * a * a + b * b;
  };
  p.eval_g = [](const Vec& x) {
    const double a = x[1] - x[0] * x[0];
    return vec({-400 * x[0] * a + 2 * (x[0] - 1), 200 * a, 0.0, 0.0, 0.0});
  };
  p.eval_hess_f = [](const Vec& x) {
    Mat h = Z(5);
    h(0, 0) = -400 * x[1] + 1200 * x[0] * x[0] + 2;
    h(0, 1) = h(1, 0) = -400 * x[0];
    h(1, 1) = 200;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * x[1] - x[2] * x[2] - 1.0,
                x[1] * x[1] - x[3] * x[3] + x[0],
                x[4] * x[4] + x[0] - 0.5});
  };
  p.eval_J = [](const Vec& x) {
    Mat J = Mat::Zero(3, 5);
    J(0, 0) = x[1];
    J(0, 1) = x[0];
    J(0, 2) = -2 * x[2];
    J(1, 0) = 1;
    J(1, 1) = 2 * x[1];
    J(1, 3) = -2 * x[3];
    J(2, 0) = 1;
    J(2, 4) = 2 * x[4];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int i) {
    Mat h = Z(5);
    if (i == 0) {
      h(0, 1) = h(1, 0) = 1;
      h(2, 2) = -2;
    } else if (i == 1) {
      h(1, 1) = 2;
      h(3, 3) = -2;
    } else {
      h(4, 4) = 2;
    }
    return h;
  };
  return p;
}

NlpProblem bt8() {
  NlpProblem p;
  p.name = "BT8";
  p.n_vars = 5;
  p.n_cons = 2;
  p.x0 = vec({1.0, 1.0, 1.0, 1.0, 1.0});
  p.known_fopt = 1.0;
  p.eval_f = [](const Vec& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  };
  p.eval_g = [](const Vec& x) {
    return vec({2 * x[0], 2 * x[1], 2 * x[2], 0.0, 0.0});
  };
  p.eval_hess_f = [](const Vec&) {
    Mat h = Z(5);
    h(0, 0) = h(1, 1) = h(2, 2) = 2;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] * x[0] + x[1] * x[1] - x[3] * x[3] - 1.0,
                x[0] - x[4] * x[4]});
  };
  p.eval_J = [](const Vec& x) {
    Mat J = Mat::Zero(2, 5);
    J(0, 0) = 2 * x[0];
    J(0, 1) = 2 * x[1];
    J(0, 3) = -2 * x[3];
    J(1, 0) = 1;
    J(1, 4) = -2 * x[4];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int i) {
    Mat h = Z(5);
    if (i == 0) {
      h(0, 0) = h(1, 1) = 2;
      h(3, 3) = -2;
    } else {
      h(4, 4) = -2;
    }
    return h;
  };
  return p;
}

NlpProblem bt12() {
  NlpProblem p;
  p.name = "BT12";
  p.n_vars = 5;
  p.n_cons = 3;
  p.x0 = vec({15.811, 1.5811, 0.0, 3.9764, 1.2574});
  p.known_fopt = 625.0 / 101.0;
  p.eval_f = [](const Vec& x) {
    return 0.01 * x[0] * x[0] + x[1] * x[1];
  };
  p.eval_g = [](const Vec& x) {
    return vec({0.02 * x[0], 2 * x[1], 0.0, 0.0, 0.0});
  };
  p.eval_hess_f = [](const Vec&) {
    Mat h = Z(5);
    h(0, 0) = 0.02;
    h(1, 1) = 2;
    return h;
  };
  p.eval_c = [](const Vec& x) {
    return vec({x[0] + x[1] - 25 - x[2] * x[2], x[0] - x[3] * x[3],
                x[1] - x[4] * x[4]});
  };
  p.eval_J = [](const Vec& x) {
    Mat J = Mat::Zero(3, 5);
    J(0, 0) = 1;
    J(0, 1) = 1;
    J(0, 2) = -2 * x[2];
    J(1, 0) = 1;
    J(1, 3) = -2 * x[3];
    J(2, 1) = 1;
    J(2, 4) = -2 * x[4];
    return J;
  };
  p.eval_hess_ci = [](const Vec&, int i) {
    Mat h = Z(5);
    h(i + 2, i + 2) = -2;
    return h;
  };
  return p;
}

std::map<std::string, std::function<NlpProblem()>> registry() {
  return {
      {"MARATOS", maratos},
      {"HS6", hs6},
      {"HS7", hs7},
      {"HS27", hs27},
      {"HS39", [] { return hs39_like("HS39"); }},
      {"HS40", hs40},
      {"HS42", hs42},
      {"HS52", [] { return hs52_like("HS52", true); }},
      {"HS77", [] { return hs77_like("HS77"); }},
      {"HS78", hs78},
      {"HS79", [] { return hs79_like("HS79"); }},
      {"BYRDSPHR", byrdsphr},
      {"BT1", bt1},
      {"BT2", bt2},
      {"BT3", [] { return hs52_like("BT3", false); }},
      {"BT4", bt4},
      {"BT5", bt5},
      {"BT6", [] { return hs77_like("BT6"); }},
      {"BT7", bt7},
      {"BT8", bt8},
      {"BT9", [] { return hs39_like("BT9"); }},
      {"BT10", bt10},
      {"BT11", [] { return hs79_like("BT11"); }},
      {"BT12", bt12},
  };
}

}  // namespace

NlpProblem corpus_lookup(const std::string& name) {
  auto reg = registry();
  auto it = reg.find(name);
  if (it == reg.end())
    throw std::out_of_range("unknown problem: " + name);
  return it->second();
}

std::vector<std::string> corpus_names() {
  std::vector<std::string> names;
  for (auto& [k, v] : registry()) names.push_back(k);
  return names;
}

std::string problem_descriptor_json(const NlpProblem& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["n"] = p.n_vars;
  j["m"] = p.n_cons;
  j["x0"] = std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size());
  if (p.known_fopt) j["known_fopt"] = *p.known_fopt;
  return j.dump();
}

}  // namespace funnel
