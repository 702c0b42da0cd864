#include "aslip/vertical_ctrl.hpp"

#include <cmath>
#include <stdexcept>

namespace aslip {

Eigen::Matrix2d lyapunov_solve(const Eigen::Matrix2d& A,
                               const Eigen::Matrix2d& Q) {
  const Eigen::Vector2cd eig = A.eigenvalues();
  if (eig(0).real() >= 0.0 || eig(1).real() >= 0.0)
    throw std::invalid_argument("lyapunov_solve: A_cl not Hurwitz");

  // Unknowns (p11, p12, p22); PA + A'P = -Q gives three independent
  // equations (the system is symmetric).
  Eigen::Matrix3d M;
  M << 2.0 * A(0, 0), 2.0 * A(1, 0), 0.0,
       A(0, 1), A(0, 0) + A(1, 1), A(1, 0),
       0.0, 2.0 * A(0, 1), 2.0 * A(1, 1);
  const Eigen::Vector3d rhs(-Q(0, 0), -Q(0, 1), -Q(1, 1));
  if (std::fabs(M.determinant()) < 1e-14)
    throw std::invalid_argument("lyapunov_solve: singular system");
  const Eigen::Vector3d p = M.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix2d P;
  P << p(0), p(1), p(1), p(2);
  if (P(0, 0) <= 0.0 || P.determinant() <= 0.0)
    throw std::invalid_argument("lyapunov_solve: P not positive definite");
  return P;
}

BacksteppingCert make_certificate(double Kp, double Kd,
                                  const Eigen::Matrix2d& Q, double k,
                                  double gamma, CertPolicy policy) {
  if (!(Kp < 0.0) || !(Kd < 0.0))
    throw std::invalid_argument("certificate: Kp, Kd must be negative");
  if (!(k > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("certificate: k, gamma must be positive");
  BacksteppingCert c;
  c.Kp = Kp;
  c.Kd = Kd;
  c.A_cl << 0.0, 1.0, Kp, Kd;
  c.Q = Q;
  c.P = lyapunov_solve(c.A_cl, Q);
  c.k = k;
  c.gamma = gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eq(Q), ep(c.P);
  c.gamma_max = eq.eigenvalues().minCoeff() / ep.eigenvalues().maxCoeff();
  c.clf_auto = gamma <= c.gamma_max;
  if (policy == CertPolicy::Strict && !c.clf_auto)
    throw std::invalid_argument(
        "certificate: gamma exceeds lambda_min(Q)/lambda_max(P)");
  return c;
}

void ReferenceFilter::reset(double z_raw, double zdot_raw) {
  zf_ = z_raw;
  zfdot_ = zdot_raw;
  zfddot_ = 0.0;
  zfdddot_ = 0.0;
  init_ = true;
}

void ReferenceFilter::step(double z_raw, double zdot_raw, double dt) {
  if (!init_) {
    reset(z_raw, zdot_raw);
    return;
  }
  const double w = omega_;
  const double w2 = w * w;
  auto acc = [&](double zf, double zfd, double tau) {
    return w2 * (z_raw + zdot_raw * tau - zf) - 2.0 * w * zfd;
  };
  // RK4 on (zf, zfdot) with the raw input linear in t.
  const double k1z = zfdot_, k1v = acc(zf_, zfdot_, 0.0);
  const double k2z = zfdot_ + 0.5 * dt * k1v,
               k2v = acc(zf_ + 0.5 * dt * k1z, zfdot_ + 0.5 * dt * k1v,
                         0.5 * dt);
  const double k3z = zfdot_ + 0.5 * dt * k2v,
               k3v = acc(zf_ + 0.5 * dt * k2z, zfdot_ + 0.5 * dt * k2v,
                         0.5 * dt);
  const double k4z = zfdot_ + dt * k3v,
               k4v = acc(zf_ + dt * k3z, zfdot_ + dt * k3v, dt);
  zf_ += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
  zfdot_ += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  zfddot_ = w2 * (z_raw + zdot_raw * dt - zf_) - 2.0 * w * zfdot_;
  zfdddot_ = w2 * (zdot_raw - zfdot_) - 2.0 * w * zfddot_;
}

OutputState desired_height(const TerrainProfile& terrain, double z0,
                           const MassState& mass, ReferenceFilter& filter,
                           double dt) {
  const double z_raw = z0 + terrain.smoothed_height_at(mass.x);
  const double zdot_raw = mass.xdot * terrain.smoothed_slope_at(mass.x);
  filter.step(z_raw, zdot_raw, dt);
  OutputState out;
  out.zd = filter.zd();
  out.zd_dot = filter.zd_dot();
  out.zd_ddot = filter.zd_ddot();
  out.zd_dddot = filter.zd_dddot();
  out.eta1 = mass.z - out.zd;
  out.eta2 = mass.zdot - out.zd_dot;
  return out;
}

FzDrift fz_drift(const ModelParams& mp, const HybridState& st) {
  FzDrift d;
  d.g_z = mp.D;
  d.n_legs = st.phase.tag == PhaseTag::SSP ? 1 : 2;
  d.f_z = 0.0;
  for (int i = 0; i < d.n_legs; ++i) {
    const StanceKin k = stance_kinematics(mp, st.mass, st.phase.legs[i]);
    const double rddot = stance_rddot(mp, st, k);
    FzDrift::Leg& leg = d.legs[i];
    leg.cos_t = k.cos_t;
    leg.sin_t = k.sin_t;
    leg.force = k.force;
    leg.fF = mp.K * k.sdot - mp.D * rddot;
    d.f_z += k.cos_t * leg.fF - k.force * k.sin_t * k.thetadot;
  }
  return d;
}

double fbl_force(const ModelParams& mp, const OutputState& out,
                 const BacksteppingCert& cert) {
  return mp.mass *
         (mp.g + out.zd_ddot + cert.Kp * out.eta1 + cert.Kd * out.eta2);
}

double fbl_force_rate(const ModelParams& mp, const OutputState& out,
                      const BacksteppingCert& cert, double F_z) {
  // eta1dot = eta2, eta2dot = F_z/m - g - zddot_d along the actual dynamics.
  const double eta2dot = F_z / mp.mass - mp.g - out.zd_ddot;
  return mp.mass *
         (out.zd_dddot + cert.Kp * out.eta2 + cert.Kd * eta2dot);
}

ClfRow clf_inequality(const ModelParams& mp, const OutputState& out,
                      double F_z, const BacksteppingCert& cert,
                      const FzDrift& drift) {
  ClfRow row;
  const Eigen::Vector2d eta(out.eta1, out.eta2);
  row.F_bar = fbl_force(mp, out, cert);
  row.F_delta = F_z - row.F_bar;
  row.F_bar_dot = fbl_force_rate(mp, out, cert, F_z);
  row.V_eta = eta.dot(cert.P * eta);
  row.V = row.V_eta + 0.5 * row.F_delta * row.F_delta;
  const double dVeta_geta =
      2.0 / mp.mass * (cert.P(0, 1) * out.eta1 + cert.P(1, 1) * out.eta2);
  const double Veta_dot = -eta.dot(cert.Q * eta);  // with F_z = F_bar
  row.a = row.F_delta * drift.g_z;
  row.b = -Veta_dot - dVeta_geta * row.F_delta -
          row.F_delta * (drift.f_z - row.F_bar_dot) - cert.gamma * row.V;
  return row;
}

double backstepping_closed_form(const ModelParams& mp, const OutputState& out,
                                double F_z, const BacksteppingCert& cert,
                                const FzDrift& drift) {
  const double F_bar = fbl_force(mp, out, cert);
  const double F_delta = F_z - F_bar;
  const double F_bar_dot = fbl_force_rate(mp, out, cert, F_z);
  const double dVeta_geta =
      2.0 / mp.mass * (cert.P(0, 1) * out.eta1 + cert.P(1, 1) * out.eta2);
  return (-dVeta_geta - cert.k * F_delta + F_bar_dot - drift.f_z) / drift.g_z;
}

double DspForceTube::Fd(double t) const {
  return F0 * std::max(0.0, 1.0 - t / T_D);
}

double DspForceTube::Fd_dot(double t) const {
  return t < T_D ? -F0 / T_D : 0.0;
}

double DspForceTube::h(double t, double F) const {
  const double fd = Fd(t);
  const double half = c * fd + dF;
  return half * half - (F - fd) * (F - fd);
}

AffineIneq cbf_ssp(const FzDrift& drift, double alpha) {
  AffineIneq row;
  row.label = AffineIneq::Label::CBF_s;
  const double h_s = drift.legs[0].force * drift.legs[0].cos_t;
  row.a[0] = -drift.g_z * drift.legs[0].cos_t;
  row.b = drift.f_z + alpha * h_s;
  return row;
}

void cbf_dsp(const FzDrift& drift, const DspForceTube& tube, double t_dsp,
             double& a_s1, double& b_s1, double& a_s2, double& b_s2,
             double& h_s1, double& h_s2) {
  const double F1 = drift.legs[0].force;
  const double F2 = drift.legs[1].force;
  const double fd = tube.Fd(t_dsp);
  const double fd_dot = tube.Fd_dot(t_dsp);
  h_s1 = tube.h(t_dsp, F1);
  h_s2 = F2;

  // d/dt h_s1 = 2(c Fd + dF) c Fd_dot - 2(F1 - Fd)(F1_dot - Fd_dot)
  a_s1 = 2.0 * (F1 - fd) * drift.g_z;
  b_s1 = tube.alpha * h_s1 + 2.0 * (tube.c * fd + tube.dF) * tube.c * fd_dot -
         2.0 * (F1 - fd) * (drift.legs[0].fF - fd_dot);

  a_s2 = -drift.g_z;
  b_s2 = drift.legs[1].fF + tube.alpha * h_s2;
}

QpProblem build_ssp_qp(const ClfRow& clf, const FzDrift& drift, double alpha,
                       double delta_weight) {
  QpProblem p;
  p.n = 2;
  p.weights = {1.0, delta_weight, 1.0};
  AffineIneq clf_row;
  clf_row.label = AffineIneq::Label::CLF;
  clf_row.a[0] = clf.a * drift.legs[0].cos_t;  // tau_z = cos(theta_s) tau_s
  clf_row.a[1] = -1.0;
  clf_row.b = clf.b;
  p.ineqs.push_back(clf_row);
  p.ineqs.push_back(cbf_ssp(drift, alpha));
  return p;
}

QpProblem build_dsp_qp(const ClfRow& clf, const FzDrift& drift,
                       const DspForceTube& tube, double t_dsp,
                       double delta_weight) {
  QpProblem p;
  p.n = 3;
  p.weights = {1.0, 1.0, delta_weight};
  AffineIneq clf_row;
  clf_row.label = AffineIneq::Label::CLF;
  clf_row.a[0] = clf.a * drift.legs[0].cos_t;
  clf_row.a[1] = clf.a * drift.legs[1].cos_t;
  clf_row.a[2] = -1.0;
  clf_row.b = clf.b;
  p.ineqs.push_back(clf_row);

  double a1, b1, a2, b2, h1, h2;
  cbf_dsp(drift, tube, t_dsp, a1, b1, a2, b2, h1, h2);
  AffineIneq r1;
  r1.label = AffineIneq::Label::CBF_s1;
  r1.a[0] = a1;
  r1.b = b1;
  p.ineqs.push_back(r1);
  AffineIneq r2;
  r2.label = AffineIneq::Label::CBF_s2;
  r2.a[1] = a2;
  r2.b = b2;
  p.ineqs.push_back(r2);
  return p;
}

}  // namespace aslip
