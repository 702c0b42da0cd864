#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace aslip {

/// One affine inequality a . x <= b over the QP decision variables.
struct AffineIneq {
  enum class Label { CLF, CBF_s, CBF_s1, CBF_s2 };
  std::array<double, 3> a{0.0, 0.0, 0.0};
  double b = 0.0;
  Label label = Label::CLF;
};

/// Strictly convex QP: min x' diag(w) x  s.t.  a_i . x <= b_i.
/// n is 2 (SSP: tau, delta) or 3 (DSP: tau_s1, tau_s2, delta).
struct QpProblem {
  int n = 2;
  std::array<double, 3> weights{1.0, 1.0, 1.0};
  std::vector<AffineIneq> ineqs;
};

struct QpSolution {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  std::uint32_t active_set = 0;  // bitmask over ineq rows
  double objective = 0.0;
  bool feasible = true;
  int violating_row = -1;  // set when !feasible
};

/// Exact solve by KKT active-set enumeration (<= 2^4 candidate sets).
/// Deterministic; ties broken by smallest active set, then lexicographic.
QpSolution qp_solve(const QpProblem& p);

}  // namespace aslip
