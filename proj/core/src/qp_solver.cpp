#include "aslip/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aslip {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kMultTol = 1e-12;

// Gaussian elimination with partial pivoting on an augmented system.
// Returns false if near-singular.
bool dense_solve(double A[6][6], double b[6], int n, double out[6]) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-12) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[piv][c], A[col][c]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r][c] * out[c];
    out[r] = s / A[r][r];
  }
  return true;
}

int popcount(std::uint32_t v) { return __builtin_popcount(v); }

}  // namespace

QpSolution qp_solve(const QpProblem& p) {
  const int n = p.n;
  const int m = static_cast<int>(p.ineqs.size());
  if (n < 1 || n > 3) throw std::invalid_argument("qp: n must be 1..3");
  if (m > 4) throw std::invalid_argument("qp: at most 4 inequalities");
  for (int j = 0; j < n; ++j)
    if (!(p.weights[j] > 0.0)) throw std::invalid_argument("qp: weights > 0");

  // A row with no variable coefficient and negative slack signals a modeling
  // breach upstream; nothing the solver can do.
  for (int i = 0; i < m; ++i) {
    bool all_zero = true;
    for (int j = 0; j < n; ++j)
      if (p.ineqs[i].a[j] != 0.0) all_zero = false;
    if (all_zero && p.ineqs[i].b < -kFeasTol) {
      QpSolution bad;
      bad.feasible = false;
      bad.violating_row = i;
      bad.objective = std::numeric_limits<double>::infinity();
      return bad;
    }
  }

  QpSolution best;
  best.feasible = false;
  best.objective = std::numeric_limits<double>::infinity();

  // Subsets ordered by cardinality then lexicographically: the first strictly
  // better candidate wins, which realizes the tie-break rule.
  std::array<std::uint32_t, 16> order{};
  int cnt = 0;
  for (int card = 0; card <= m; ++card)
    for (std::uint32_t s = 0; s < (1u << m); ++s)
      if (popcount(s) == card) order[cnt++] = s;

  for (int oi = 0; oi < cnt; ++oi) {
    const std::uint32_t s = order[oi];
    const int k = popcount(s);
    if (k > n) continue;

    // KKT for min x'Wx s.t. A_S x = b_S:  [2W A_S'; A_S 0][x; mu] = [0; b_S]
    double M[6][6] = {};
    double rhs[6] = {};
    double sol[6] = {};
    const int dim = n + k;
    for (int j = 0; j < n; ++j) M[j][j] = 2.0 * p.weights[j];
    int row = 0;
    for (int i = 0; i < m; ++i) {
      if (!(s & (1u << i))) continue;
      for (int j = 0; j < n; ++j) {
        M[j][n + row] = p.ineqs[i].a[j];
        M[n + row][j] = p.ineqs[i].a[j];
      }
      rhs[n + row] = p.ineqs[i].b;
      ++row;
    }
    if (!dense_solve(M, rhs, dim, sol)) continue;

    // Multiplier signs (dual feasibility), tolerance scaled to their size.
    bool ok = true;
    double mu_scale = 1.0;
    for (int i = 0; i < k; ++i)
      mu_scale = std::max(mu_scale, std::fabs(sol[n + i]));
    for (int i = 0; i < k; ++i)
      if (sol[n + i] < -kMultTol * mu_scale) ok = false;
    if (!ok) continue;

    // Primal feasibility over all rows, relative to the row's magnitude
    // (rows can carry coefficients of order 1e6 and beyond).
    for (int i = 0; i < m && ok; ++i) {
      double lhs = 0.0, scale = 1.0;
      for (int j = 0; j < n; ++j) {
        lhs += p.ineqs[i].a[j] * sol[j];
        scale = std::max(scale, std::fabs(p.ineqs[i].a[j] * sol[j]));
      }
      scale = std::max(scale, std::fabs(p.ineqs[i].b));
      if (lhs > p.ineqs[i].b + kFeasTol * scale) ok = false;
    }
    if (!ok) continue;

    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += p.weights[j] * sol[j] * sol[j];
    if (obj < best.objective - 1e-12) {
      best.feasible = true;
      best.objective = obj;
      best.active_set = s;
      for (int j = 0; j < n; ++j) best.x[j] = sol[j];
    }
  }

  if (!best.feasible) {
    // By construction (delta relaxes the CLF row) this is unreachable unless
    // a zero-coefficient row slipped past the check above.
    best.violating_row = 0;
  }
  return best;
}

}  // namespace aslip
