#pragma once

#include <Eigen/Dense>

#include "aslip/dynamics.hpp"
#include "aslip/qp_solver.hpp"
#include "aslip/terrain.hpp"

namespace aslip {

/// Vertical tracking output and the reference it tracks.
struct OutputState {
  double eta1 = 0.0;  // z - z_d, m
  double eta2 = 0.0;  // zdot - zdot_d, m/s
  double zd = 0.0, zd_dot = 0.0, zd_ddot = 0.0, zd_dddot = 0.0;
};

/// Lyapunov certificate for the backstepping design.
struct BacksteppingCert {
  double Kp = -100.0, Kd = -20.0;
  Eigen::Matrix2d A_cl;
  Eigen::Matrix2d Q;
  Eigen::Matrix2d P;
  double k = 10.0;      // backstepping gain
  double gamma = 10.0;  // CLF rate
  double gamma_max = 0.0;  // lambda_min(Q) / lambda_max(P)
  bool clf_auto = false;   // gamma <= gamma_max (F_delta = 0 row is a tautology)
};

enum class CertPolicy { Strict, Relaxed };

/// Solves P A_cl + A_cl' P = -Q (2x2 closed form). Throws on non-Hurwitz
/// A_cl or non-SPD result.
Eigen::Matrix2d lyapunov_solve(const Eigen::Matrix2d& A_cl,
                               const Eigen::Matrix2d& Q);

/// Builds and validates the certificate. Strict policy additionally rejects
/// gamma > lambda_min(Q)/lambda_max(P); Relaxed accepts and records the
/// bound in gamma_max / clf_auto.
BacksteppingCert make_certificate(double Kp, double Kd,
                                  const Eigen::Matrix2d& Q, double k,
                                  double gamma,
                                  CertPolicy policy = CertPolicy::Strict);

/// Critically damped second-order reference shaping filter; produces
/// consistent (z_d, zdot_d, zddot_d, zdddot_d) from the raw terrain-following
/// height. Owned by the simulation loop.
class ReferenceFilter {
 public:
  explicit ReferenceFilter(double omega = 20.0) : omega_(omega) {}

  void reset(double z_raw, double zdot_raw = 0.0);
  /// Advances one control tick; the raw input is treated as linear in t.
  void step(double z_raw, double zdot_raw, double dt);

  bool initialized() const { return init_; }
  double zd() const { return zf_; }
  double zd_dot() const { return zfdot_; }
  double zd_ddot() const { return zfddot_; }
  double zd_dddot() const { return zfdddot_; }

 private:
  double omega_;
  bool init_ = false;
  double zf_ = 0.0, zfdot_ = 0.0;
  double zfddot_ = 0.0, zfdddot_ = 0.0;
};

/// z0 + smoothed terrain height under the mass, shaped by the filter.
OutputState desired_height(const TerrainProfile& terrain, double z0,
                           const MassState& mass, ReferenceFilter& filter,
                           double dt);

/// Drift of the net vertical force F_z (and of each stance-leg force) at
/// tau = 0, plus the input gain g_z = D.
struct FzDrift {
  double f_z = 0.0;  // N/s
  double g_z = 0.0;  // = D
  int n_legs = 1;
  struct Leg {
    double cos_t, sin_t;
    double force;  // N
    double fF;     // leg force rate at tau = 0: K sdot - D rddot
  };
  std::array<Leg, 2> legs;
};

FzDrift fz_drift(const ModelParams& mp, const HybridState& st);

/// Feedback-linearizing net vertical force m (g + zddot_d + Kp e1 + Kd e2).
double fbl_force(const ModelParams& mp, const OutputState& out,
                 const BacksteppingCert& cert);

/// Analytic d/dt of fbl_force along the actual output dynamics.
double fbl_force_rate(const ModelParams& mp, const OutputState& out,
                      const BacksteppingCert& cert, double F_z);

/// Backstepping-CLF row over the scalar tau_z, plus the certificates'
/// instantaneous values for logging.
struct ClfRow {
  double a = 0.0, b = 0.0;   // a tau_z <= b
  double V = 0.0, V_eta = 0.0;
  double F_delta = 0.0, F_bar = 0.0, F_bar_dot = 0.0;
};

ClfRow clf_inequality(const ModelParams& mp, const OutputState& out,
                      double F_z, const BacksteppingCert& cert,
                      const FzDrift& drift);

/// Closed-form backstepping controller on tau_z.
double backstepping_closed_form(const ModelParams& mp, const OutputState& out,
                                double F_z, const BacksteppingCert& cert,
                                const FzDrift& drift);

/// Shrinking admissible force band for the lift-off leg in DSP.
struct DspForceTube {
  double F0 = 0.0;    // N, s1 force at DSP entry
  double T_D = 0.1;   // s
  double c = 0.5;     // relaxation in (0,1)
  double dF = 20.0;   // N
  double alpha = 500.0;

  // F_d clamps at zero past T_D so the band collapses to [-dF, dF].
  double Fd(double t) const;
  double Fd_dot(double t) const;
  double lower(double t) const { return (1.0 - c) * Fd(t) - dF; }
  double upper(double t) const { return (1.0 + c) * Fd(t) + dF; }
  double h(double t, double F) const;
};

/// SSP force barrier h_s = F_z^SSP >= 0 as a row over tau_s.
AffineIneq cbf_ssp(const FzDrift& drift, double alpha);

/// DSP rows: tube barrier on s1 (over tau_s1) and positivity on s2 (over
/// tau_s2). Single-variable rows; placement into the QP is the builder's job.
void cbf_dsp(const FzDrift& drift, const DspForceTube& tube, double t_dsp,
             double& a_s1, double& b_s1, double& a_s2, double& b_s2,
             double& h_s1, double& h_s2);

/// BBF-QP assembly. Variables: SSP (tau_s, delta), DSP (tau_s1, tau_s2,
/// delta). The CLF row carries delta; CBF rows never do.
QpProblem build_ssp_qp(const ClfRow& clf, const FzDrift& drift, double alpha,
                       double delta_weight = 1.0);
QpProblem build_dsp_qp(const ClfRow& clf, const FzDrift& drift,
                       const DspForceTube& tube, double t_dsp,
                       double delta_weight = 1.0);

}  // namespace aslip
