#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "aslip/qp_solver.hpp"

using namespace aslip;

namespace {

double objective(const QpProblem& p, const std::array<double, 3>& x) {
  double o = 0.0;
  for (int i = 0; i < p.n; ++i) o += p.weights[i] * x[i] * x[i];
  return o;
}

bool feasible(const QpProblem& p, const std::array<double, 3>& x,
              double tol = 1e-9) {
  for (const auto& row : p.ineqs) {
    double ax = 0.0, scale = std::fabs(row.b);
    for (int i = 0; i < p.n; ++i) {
      ax += row.a[i] * x[i];
      scale = std::max(scale, std::fabs(row.a[i] * x[i]));
    }
    if (ax > row.b + tol * std::max(1.0, scale)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("unconstrained minimum is the origin") {
  QpProblem p;
  p.n = 3;
  const QpSolution s = qp_solve(p);
  CHECK(s.feasible);
  for (int i = 0; i < 3; ++i) CHECK(s.x[i] == 0.0);
  CHECK(s.objective == 0.0);
  CHECK(s.active_set == 0);
}

TEST_CASE("single active bound x0 <= -3") {
  QpProblem p;
  p.n = 2;
  p.ineqs.push_back({{1.0, 0.0, 0.0}, -3.0, AffineIneq::Label::CBF_s});
  const QpSolution s = qp_solve(p);
  CHECK(s.feasible);
  CHECK(s.x[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(0.0));
  CHECK(s.active_set == 1);
}

TEST_CASE("inactive constraint leaves the origin optimal") {
  QpProblem p;
  p.n = 2;
  p.ineqs.push_back({{1.0, 0.0, 0.0}, 5.0, AffineIneq::Label::CBF_s});
  const QpSolution s = qp_solve(p);
  CHECK(s.feasible);
  CHECK(s.x[0] == 0.0);
  CHECK(s.x[1] == 0.0);
}

TEST_CASE("weights shift the constrained optimum") {
  // min w0 x0^2 + w1 x1^2 s.t. x0 + x1 <= -1:
  // analytic optimum x = -(1/w_i) / (1/w0 + 1/w1).
  QpProblem p;
  p.n = 2;
  p.weights = {2.0, 0.5, 1.0};
  p.ineqs.push_back({{1.0, 1.0, 0.0}, -1.0, AffineIneq::Label::CLF});
  const QpSolution s = qp_solve(p);
  CHECK(s.feasible);
  const double denom = 1.0 / 2.0 + 1.0 / 0.5;
  CHECK(s.x[0] == doctest::Approx(-(1.0 / 2.0) / denom).epsilon(1e-10));
  CHECK(s.x[1] == doctest::Approx(-(1.0 / 0.5) / denom).epsilon(1e-10));
}

TEST_CASE("contradictory zero-coefficient row reports infeasible") {
  QpProblem p;
  p.n = 2;
  p.ineqs.push_back({{0.0, 0.0, 0.0}, -1.0, AffineIneq::Label::CBF_s});
  const QpSolution s = qp_solve(p);
  CHECK(!s.feasible);
  CHECK(s.violating_row == 0);
}

TEST_CASE("opposing half-planes report infeasible") {
  QpProblem p;
  p.n = 2;
  p.ineqs.push_back({{1.0, 0.0, 0.0}, -2.0, AffineIneq::Label::CBF_s});
  p.ineqs.push_back({{-1.0, 0.0, 0.0}, 1.0, AffineIneq::Label::CBF_s1});
  const QpSolution s = qp_solve(p);
  CHECK(!s.feasible);
}

TEST_CASE("random instances: feasibility, local optimality, determinism") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> logscale(0.0, 3.0);
  std::uniform_int_distribution<int> nrows(1, 4);

  int solved = 0;
  for (int it = 0; it < 2000; ++it) {
    QpProblem p;
    p.n = (it % 2) ? 2 : 3;
    for (int i = 0; i < p.n; ++i)
      p.weights[i] = std::pow(10.0, logscale(rng) - 1.5);
    const int m = nrows(rng);
    const double scale = std::pow(10.0, logscale(rng));
    for (int r = 0; r < m; ++r) {
      AffineIneq row;
      for (int i = 0; i < p.n; ++i) row.a[i] = unit(rng) * scale;
      row.b = unit(rng) * scale;
      p.ineqs.push_back(row);
    }

    const QpSolution s = qp_solve(p);
    const QpSolution s2 = qp_solve(p);
    // Bit-identical repeated solve.
    for (int i = 0; i < p.n; ++i) CHECK(s.x[i] == s2.x[i]);
    CHECK(s.feasible == s2.feasible);
    if (!s.feasible) continue;
    ++solved;

    CHECK(feasible(p, s.x, 1e-7));

    // Convexity makes local optimality global: probe feasible directions at
    // a small step and require no descent.
    const double obj = objective(p, s.x);
    const double norm = std::sqrt(obj / p.weights[0] + 1.0);
    for (int d = 0; d < 48; ++d) {
      std::array<double, 3> dir{0.0, 0.0, 0.0};
      double len = 0.0;
      for (int i = 0; i < p.n; ++i) {
        dir[i] = unit(rng);
        len += dir[i] * dir[i];
      }
      len = std::sqrt(len);
      const double eps = 1e-4 * std::max(1.0, norm);
      std::array<double, 3> cand = s.x;
      for (int i = 0; i < p.n; ++i) cand[i] += eps * dir[i] / len;
      if (feasible(p, cand, 0.0))
        CHECK(objective(p, cand) >= obj - 1e-9 * std::max(1.0, obj));
    }
  }
  CHECK(solved > 500);  // the generator must exercise the feasible path
}

TEST_CASE("solve time meets the 1 kHz budget") {
  // Representative DSP-shaped instance: CLF row with relaxation plus two
  // hard CBF rows over three variables.
  QpProblem p;
  p.n = 3;
  p.ineqs.push_back({{120.0, 35.0, -1.0}, 250.0, AffineIneq::Label::CLF});
  p.ineqs.push_back({{-100.0, 0.0, 0.0}, 4000.0, AffineIneq::Label::CBF_s1});
  p.ineqs.push_back({{0.0, -100.0, 0.0}, 300.0, AffineIneq::Label::CBF_s2});
  p.ineqs.push_back({{80.0, 20.0, 0.0}, 2500.0, AffineIneq::Label::CBF_s1});

  const int n_solve = 20000;
  std::vector<double> us(n_solve);
  double sink = 0.0;
  for (int i = 0; i < n_solve; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const QpSolution s = qp_solve(p);
    const auto t1 = std::chrono::steady_clock::now();
    sink += s.x[0];
    us[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();
  }
  std::nth_element(us.begin(), us.begin() + n_solve / 2, us.end());
  const double median = us[n_solve / 2];
  INFO("median solve time " << median << " us, checksum " << sink);
  CHECK(median < 50.0);
}
