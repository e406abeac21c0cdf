#pragma once

// Explicit Langevin systems for the model catalog, parameterized by physical
// rates.  All frequencies are angular.  Sign convention throughout:
//   dA/dt = M A - G A_in + drive.

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "hoops/algebra.hpp"
#include "hoops/langevin.hpp"

namespace hoops {

inline constexpr cplx I{0.0, 1.0};

/// Standard optomechanics parameter block.  gamma_total = kappa + Gamma and
/// theta = kappa + 2 Gamma are derived, never stored.
struct OptomechParams {
  double Omega = 1.0;   // mechanical angular frequency
  double kappa = 0.1;   // optical decay rate
  double Gamma = 1e-5;  // mechanical decay rate
  double g0 = 1e-3;     // single-photon coupling rate
  double Delta = 0.0;   // detuning
  cplx alpha = 0.0;     // drive amplitude, photon-flux^1/2 units
  double m_th = 0.0;    // thermal phonon occupation

  double gamma_total() const { return kappa + Gamma; }
  double theta() const { return kappa + 2.0 * Gamma; }

  void validate() const {
    if (Omega <= 0 || kappa <= 0 || Gamma <= 0)
      throw std::invalid_argument("OptomechParams: rates must be positive");
    if (m_th < 0) throw std::invalid_argument("OptomechParams: m_th must be non-negative");
  }

  static double thermal_occupation(double Omega, double temperature_K) {
    constexpr double hbar_over_kB = 7.638232577577112e-12;  // s K
    if (temperature_K <= 0) return 0.0;
    return 1.0 / std::expm1(hbar_over_kB * Omega / temperature_K);
  }
};

/// Quadratic optomechanics parameters.  beta defaults to the geometric
/// relation beta = (1/4)(pi^2/3 + 1/4)(Omega/omega)^2 eps; rho = 2 beta/eps.
struct QuadraticParams {
  double omega = 1.0;   // bare optical frequency
  double Omega = 1.0;   // bare mechanical frequency
  double eps = 1e-4;    // standard quadratic rate
  double kappa = 1e-2;
  double Gamma = 1e-4;
  cplx alpha = 0.0;
  std::optional<double> beta_override;

  double beta() const {
    if (beta_override) return *beta_override;
    return 0.25 * (M_PI * M_PI / 3.0 + 0.25) * (Omega / omega) * (Omega / omega) * eps;
  }
  double rho() const { return 2.0 * beta() / eps; }

  /// Shifted effective frequencies.
  double omega_eff() const { return omega + 0.5 * eps + beta(); }
  double Omega_eff() const { return Omega + beta(); }
};

namespace detail {

// Channel densities under the (M - iwI)^-1 kernel: the emission (anti-normal)
// weight sits on the negative-frequency side of each channel's own resonance,
// so the b†_in channel carries m_th+1 at w > 0 where it resonates (Stokes).
inline std::vector<NoiseChannel> optical_mech_channels(double m_th) {
  return {{"a_in", 0.0, 1.0, {}},
          {"a_in_dag", 1.0, 0.0, {}},
          {"b_in", m_th, m_th + 1.0, {}},
          {"b_in_dag", m_th + 1.0, m_th, {}}};
}

}  // namespace detail

/// Fully linearized 4x4 optomechanics on the basis {a, a†, b, b†} with
/// g = g0 sqrt(nbar) and static spring shift f.
inline LangevinSystem build_linearized_optomech(const OptomechParams& p, double nbar,
                                                std::optional<double> f_shift = {}) {
  p.validate();
  if (nbar < 0) throw std::invalid_argument("nbar must be non-negative");
  double g = p.g0 * std::sqrt(nbar);
  double f = f_shift ? *f_shift
                     : 2.0 * p.g0 * p.g0 * p.Omega * nbar /
                           (p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma);
  LangevinSystem s;
  s.basis_labels = {"a", "a_dag", "b", "b_dag"};
  s.M.setZero(4, 4);
  s.M(0, 0) = I * (p.Delta + f) - 0.5 * p.kappa;
  s.M(0, 2) = I * g;
  s.M(0, 3) = I * g;
  s.M(1, 1) = -I * (p.Delta + f) - 0.5 * p.kappa;
  s.M(1, 2) = -I * g;
  s.M(1, 3) = -I * g;
  s.M(2, 0) = I * g;
  s.M(2, 1) = I * g;
  s.M(2, 2) = -I * p.Omega - 0.5 * p.Gamma;
  s.M(3, 0) = -I * g;
  s.M(3, 1) = -I * g;
  s.M(3, 3) = I * p.Omega - 0.5 * p.Gamma;
  s.noise_map.setZero(4, 4);
  s.noise_map(0, 0) = std::sqrt(p.kappa);
  s.noise_map(1, 1) = std::sqrt(p.kappa);
  s.noise_map(2, 2) = std::sqrt(p.Gamma);
  s.noise_map(3, 3) = std::sqrt(p.Gamma);
  s.channels = detail::optical_mech_channels(p.m_th);
  s.drive = Eigen::VectorXcd::Zero(4);
  s.decay_rates = (Eigen::VectorXd(4) << p.kappa, p.kappa, p.Gamma, p.Gamma).finished();
  s.frame = Frame::rotating;
  s.means_used.n = nbar;
  s.validate();
  return s;
}

/// Second-order optomechanical systems.
///   order 3: basis {a, ab, ab†}
///   order 5: basis {a, ab, ab†, ab², ab†²}  (one-photon two-phonon block)
///   order 6: basis {a, b, ab, ab†, n, c}
/// include_b_shift keeps the s = g0*bbar diagonal terms; dropping it matches
/// the spring-analysis variant.
inline LangevinSystem build_second_order_optomech(const OptomechParams& p, double nbar,
                                                  double mbar, cplx bbar, int order,
                                                  bool include_b_shift = true) {
  p.validate();
  if (nbar < 0 || mbar < 0)
    throw std::invalid_argument("build_second_order_optomech: negative means");
  const double g0 = p.g0, kappa = p.kappa, Gamma = p.Gamma;
  const double gamma = p.gamma_total(), theta = p.theta();
  const double DB = p.Delta - p.Omega, DR = p.Delta + p.Omega;
  const double DBB = p.Delta - 2.0 * p.Omega, DRR = p.Delta + 2.0 * p.Omega;
  const cplx s_shift = include_b_shift ? cplx(g0) * bbar : cplx(0.0);
  const double Lp = g0 * (mbar + nbar + 1.0);
  const double Lm = g0 * (mbar - nbar);

  LangevinSystem s;
  s.frame = Frame::rotating;
  s.means_used = {nbar, mbar, bbar, 0.0, 0.0};

  if (order == 3) {
    s.basis_labels = {"a", "ab", "ab_dag"};
    s.M.setZero(3, 3);
    s.M(0, 0) = I * p.Delta - 0.5 * kappa;
    s.M(0, 1) = I * g0;
    s.M(0, 2) = I * g0;
    s.M(1, 0) = I * Lp;
    s.M(1, 1) = I * (DB + s_shift) - 0.5 * gamma;
    s.M(2, 0) = I * Lm;
    s.M(2, 2) = I * (DR + std::conj(s_shift)) - 0.5 * gamma;
    s.noise_map.setZero(3, 3);
    s.noise_map(0, 0) = std::sqrt(kappa);
    s.noise_map(1, 0) = std::sqrt(kappa) * bbar;
    s.noise_map(1, 1) = std::sqrt(Gamma * nbar);
    s.noise_map(2, 0) = std::sqrt(kappa) * std::conj(bbar);
    s.noise_map(2, 2) = std::sqrt(Gamma * nbar);
    s.channels = {{"a_in", 0.5, 0.5, {}},
                  {"b_in", p.m_th + 0.5, p.m_th + 0.5, std::string("abar")},
                  {"b_in_dag", p.m_th + 0.5, p.m_th + 0.5, std::string("abar")}};
    s.drive.resize(3);
    s.drive << -p.alpha, -bbar * p.alpha, -std::conj(bbar) * std::conj(p.alpha);
    s.decay_rates = (Eigen::VectorXd(3) << kappa, gamma, gamma).finished();
  } else if (order == 5) {
    s.basis_labels = {"a", "ab", "ab_dag", "abb", "abb_dag"};
    s.M.setZero(5, 5);
    s.M(0, 0) = I * p.Delta - 0.5 * kappa;
    s.M(0, 1) = I * g0;
    s.M(0, 2) = I * g0;
    s.M(1, 0) = I * Lp;
    s.M(1, 1) = I * (DB + s_shift) - 0.5 * gamma;
    s.M(1, 3) = I * g0;
    s.M(2, 0) = I * Lm;
    s.M(2, 2) = I * (DR + std::conj(s_shift)) - 0.5 * gamma;
    s.M(2, 4) = I * g0;
    s.M(3, 1) = I * g0 * (mbar + 2.0 * nbar + 2.0);
    s.M(3, 3) = I * DBB - 0.5 * theta;
    s.M(4, 2) = I * g0 * (mbar - 2.0 * nbar - 1.0);
    s.M(4, 4) = I * DRR - 0.5 * theta;
    s.noise_map.setZero(5, 3);
    s.noise_map(0, 0) = std::sqrt(kappa);
    s.noise_map(1, 0) = std::sqrt(0.5 * kappa * mbar);
    s.noise_map(1, 1) = std::sqrt(Gamma * nbar);
    s.noise_map(2, 0) = std::sqrt(0.5 * kappa * mbar);
    s.noise_map(2, 2) = std::sqrt(Gamma * nbar);
    s.noise_map(3, 0) = 0.5 * std::sqrt(kappa) * mbar;
    s.noise_map(3, 1) = std::sqrt(Gamma * nbar * mbar);
    s.noise_map(4, 0) = 0.5 * std::sqrt(kappa) * mbar;
    s.noise_map(4, 2) = std::sqrt(Gamma * nbar * mbar);
    s.channels = {{"a_in", 0.5, 0.5, {}},
                  {"b_in", p.m_th + 0.5, p.m_th + 0.5, std::string("abar")},
                  {"b_in_dag", p.m_th + 0.5, p.m_th + 0.5, std::string("abar")}};
    s.drive.resize(5);
    cplx b2 = bbar * bbar;
    s.drive << -p.alpha, -bbar * p.alpha, -std::conj(bbar) * p.alpha, -b2 * p.alpha,
        -std::conj(b2) * p.alpha;
    s.decay_rates = (Eigen::VectorXd(5) << kappa, gamma, gamma, theta, theta).finished();
  } else if (order == 6) {
    double g = g0 * std::sqrt(nbar);
    double K = nbar * kappa;
    s.basis_labels = {"a", "b", "ab", "ab_dag", "n", "c"};
    s.M.setZero(6, 6);
    s.M(0, 0) = I * p.Delta - 0.5 * kappa;
    s.M(0, 2) = I * g0;
    s.M(0, 3) = I * g0;
    s.M(1, 1) = -I * p.Omega - 0.5 * Gamma;
    s.M(1, 4) = I * g0;
    s.M(2, 0) = I * Lp;
    s.M(2, 2) = I * (DB + s_shift) - 0.5 * gamma;
    s.M(3, 0) = I * Lm;
    s.M(3, 3) = I * (DR + std::conj(s_shift)) - 0.5 * gamma;
    s.M(4, 4) = -kappa;
    s.M(5, 2) = I * g;
    s.M(5, 3) = I * g;
    s.M(5, 5) = 2.0 * I * (p.Delta + 2.0 * s_shift.real()) - kappa;
    s.noise_map.setZero(6, 4);
    s.noise_map(0, 0) = std::sqrt(kappa);
    s.noise_map(1, 2) = std::sqrt(Gamma);
    s.noise_map(2, 0) = std::sqrt(kappa) * bbar;
    s.noise_map(2, 2) = std::sqrt(Gamma * nbar);
    s.noise_map(3, 0) = std::sqrt(kappa) * std::conj(bbar);
    s.noise_map(3, 3) = std::sqrt(Gamma * nbar);
    s.noise_map(4, 0) = std::sqrt(K);
    s.noise_map(4, 1) = std::sqrt(K);
    s.noise_map(5, 0) = std::sqrt(K);
    s.channels = detail::optical_mech_channels(p.m_th);
    s.channels[2].S_plus = s.channels[2].S_minus = p.m_th + 0.5;
    s.channels[3].S_plus = s.channels[3].S_minus = p.m_th + 0.5;
    s.drive.resize(6);
    double rn = std::sqrt(nbar);
    s.drive << -p.alpha, 0.0, -bbar * p.alpha, -std::conj(bbar) * std::conj(p.alpha),
        -rn * (p.alpha + std::conj(p.alpha)), -rn * p.alpha;
    s.decay_rates =
        (Eigen::VectorXd(6) << kappa, Gamma, gamma, gamma, 2 * kappa, 2 * kappa).finished();
  } else {
    throw std::invalid_argument("build_second_order_optomech: order must be 3, 5 or 6");
  }
  s.validate();
  return s;
}

/// Minimal basis {N = n^2, B = n b}: exactly linear 2x2 lower-triangular
/// system with multiplicative noise taken in its lowest-order form.
inline LangevinSystem build_minimal_optomech(const OptomechParams& p, double nbar, cplx bbar) {
  p.validate();
  if (nbar < 0) throw std::invalid_argument("build_minimal_optomech: negative nbar");
  double gamma = p.gamma_total();
  LangevinSystem s;
  s.basis_labels = {"N", "B"};
  s.M.setZero(2, 2);
  s.M(0, 0) = -2.0 * p.kappa;
  s.M(1, 0) = I * p.g0;
  s.M(1, 1) = -I * p.Omega - 0.5 * gamma;
  // channels: a_in, a_in†, b_in
  s.noise_map.setZero(2, 3);
  double rn = std::sqrt(nbar);
  s.noise_map(0, 0) = std::sqrt(2.0 * p.kappa) * rn * nbar * 0.5;
  s.noise_map(0, 1) = s.noise_map(0, 0);
  s.noise_map(1, 0) = std::sqrt(p.kappa * nbar) * bbar;
  s.noise_map(1, 1) = s.noise_map(1, 0);
  s.noise_map(1, 2) = std::sqrt(p.Gamma) * nbar;
  s.channels = {{"a_in", 0.5, 0.5, {}},
                {"a_in_dag", 0.5, 0.5, {}},
                {"b_in", p.m_th + 0.5, p.m_th + 0.5, {}}};
  // drive chosen so the classical fixed point sits at (nbar^2, nbar*bbar)
  s.drive.resize(2);
  s.drive << 2.0 * p.kappa * nbar * nbar, 0.5 * p.kappa * nbar * bbar;
  s.decay_rates = (Eigen::VectorXd(2) << 2.0 * p.kappa, gamma).finished();
  s.frame = Frame::rotating;
  s.means_used = {nbar, 0.0, bbar, 0.0, 0.0};
  s.validate();
  return s;
}

/// Quadratic optomechanics, 6x6 on {c, c†, n, d, d†, m} with zeta = eps+beta,
/// chi = eps-beta.  Absolute-frequency frame.
inline LangevinSystem build_quadratic(const QuadraticParams& p, double nbar, double mbar,
                                      cplx dbar) {
  if (nbar < 0 || mbar < 0) throw std::invalid_argument("build_quadratic: negative means");
  const double beta = p.beta(), eps = p.eps;
  const double zeta = eps + beta, chi = eps - beta;
  const double om = p.omega_eff(), Om = p.Omega_eff();
  const double nt = nbar + 0.5, mt = mbar + 0.5;
  LangevinSystem s;
  s.basis_labels = {"c", "c_dag", "n", "d", "d_dag", "m"};
  s.M.setZero(6, 6);
  s.M(0, 0) = 2.0 * I * (om - zeta * mbar) - p.kappa;
  s.M(0, 2) = -I * beta * mbar;
  s.M(0, 3) = I * beta * nt;
  s.M(0, 4) = I * beta * nt;
  s.M(0, 5) = -I * beta * nt;
  s.M(1, 1) = -2.0 * I * (om - zeta * mbar) - p.kappa;
  s.M(1, 2) = I * beta * mbar;
  s.M(1, 3) = -I * beta * nt;
  s.M(1, 4) = -I * beta * nt;
  s.M(1, 5) = I * beta * nt;
  s.M(2, 0) = 2.0 * I * beta * mbar;
  s.M(2, 1) = -2.0 * I * beta * mbar;
  s.M(2, 2) = -p.kappa;
  s.M(3, 0) = I * beta * mt;
  s.M(3, 1) = I * beta * mt;
  s.M(3, 2) = -I * chi * mt;
  s.M(3, 3) = -2.0 * I * (Om + zeta * nbar) - p.Gamma;
  s.M(3, 5) = -I * chi * nbar;
  s.M(4, 0) = -I * beta * mt;
  s.M(4, 1) = -I * beta * mt;
  s.M(4, 2) = I * chi * mt;
  s.M(4, 4) = 2.0 * I * (Om + zeta * nbar) - p.Gamma;
  s.M(4, 5) = I * chi * nbar;
  s.M(5, 3) = 2.0 * I * chi * nbar;
  s.M(5, 4) = -2.0 * I * chi * nbar;
  s.M(5, 5) = -p.Gamma;

  double ad = std::abs(dbar);
  Eigen::VectorXd gam(6);
  gam << nbar * p.kappa, nbar * p.kappa, 4.0 * nbar * p.kappa, 2.0 * ad * p.Gamma,
      2.0 * ad * p.Gamma, 4.0 * ad * p.Gamma;
  s.noise_map = gam.cwiseSqrt().asDiagonal();
  s.channels = {{"a_in", 0.0, 1.0, {}},
                {"a_in_dag", 1.0, 0.0, {}},
                {"a_quad", 0.5, 0.5, {}},
                {"b_in", mbar, mbar + 1.0, {}},
                {"b_in_dag", mbar + 1.0, mbar, {}},
                {"b_quad", mbar + 0.5, mbar + 0.5, {}}};
  s.drive = Eigen::VectorXcd::Zero(6);
  s.decay_rates = gam;
  s.frame = Frame::absolute;
  s.means_used = {nbar, mbar, 0.0, dbar, 0.0};
  s.validate();
  return s;
}

/// Cross-Kerr with parametric amplification, dimensionless (time unit 1/2Omega).
struct CrossKerrSystem {
  LangevinSystem six;          // basis {m, d, d†, nm, nd, nd†}
  LangevinSystem reduced;      // basis {dd, dd†, dm} fluctuations
  Eigen::Matrix3cd A, B;       // structure blocks
  Eigen::Matrix3cd V_witness;  // decoupling witness, closed form
  double alpha = 0, beta = 0, lambda = 0;
  std::vector<double> gamma_l; // normalized block decay rates
};

namespace detail {

inline Eigen::Matrix3cd cross_kerr_A(double alpha) {
  Eigen::Matrix3cd A;
  A << 0, 2 * alpha, -2 * alpha, -alpha, -1, 0, alpha, 0, 1;
  return A;
}

inline Eigen::Matrix3cd cross_kerr_B(double beta) {
  Eigen::Matrix3cd B;
  B.setZero();
  B(1, 1) = -beta;
  B(2, 2) = beta;
  return B;
}

}  // namespace detail

inline CrossKerrSystem build_cross_kerr(double omega, double Omega, double kappa, double Gamma,
                                        double g, double f, double nbar, double mbar, cplx dbar) {
  if (omega <= 0 || Omega <= 0 || kappa <= 0 || Gamma <= 0)
    throw std::invalid_argument("build_cross_kerr: rates must be positive");
  CrossKerrSystem ck;
  ck.alpha = f / Omega;
  ck.beta = g / Omega;
  ck.lambda = kappa / (2.0 * Omega);
  double singular = 4.0 * ck.alpha * ck.alpha - ck.lambda * ck.lambda - 1.0;
  if (std::abs(singular) < 1e-14)
    throw std::domain_error("build_cross_kerr: decoupling witness singular (4a^2 = l^2 + 1)");

  for (int l = 1; l <= 3; ++l) ck.gamma_l.push_back((Gamma + (l - 1) * kappa) / (2.0 * Omega));

  ck.A = detail::cross_kerr_A(ck.alpha);
  ck.B = detail::cross_kerr_B(ck.beta);

  // closed-form witness, lambda = kappa / 2 Omega
  {
    const double a = ck.alpha, b = ck.beta, l = ck.lambda;
    const cplx il(0.0, 1.0);
    Eigen::Matrix3cd V;
    V << 0, 2 * a * b * (il - l), -2 * a * b * (il + l),
        -a * b * (il + l), -il * b * (1 + l * l), 0,
        a * b * (il - l), 0, il * b * (1 + l * l);
    ck.V_witness = V / (l * singular);
  }

  // truncated 6x6: blocks [[iA - G1, iB], [0, iA - G2]]
  LangevinSystem& six = ck.six;
  six.basis_labels = {"m", "d", "d_dag", "nm", "nd", "nd_dag"};
  six.M.setZero(6, 6);
  six.M.block<3, 3>(0, 0) = I * ck.A - ck.gamma_l[0] * Eigen::Matrix3cd::Identity();
  six.M.block<3, 3>(0, 3) = I * ck.B;
  six.M.block<3, 3>(3, 3) = I * ck.A - ck.gamma_l[1] * Eigen::Matrix3cd::Identity();
  six.noise_map.setZero(6, 3);
  // linearized multiplicative injections on the three-channel set
  cplx bbar = std::sqrt(2.0 * dbar);
  double root2O = 1.0;  // channels already carry the normalized density
  six.noise_map(0, 1) = std::sqrt(ck.gamma_l[0]) * std::conj(bbar) * root2O;
  six.noise_map(0, 2) = std::sqrt(ck.gamma_l[0]) * bbar * root2O;
  six.noise_map(1, 1) = std::sqrt(ck.gamma_l[0]) * bbar;
  six.noise_map(2, 2) = std::sqrt(ck.gamma_l[0]) * std::conj(bbar);
  six.noise_map(3, 1) = std::sqrt(ck.gamma_l[1]) * std::conj(bbar) * nbar;
  six.noise_map(3, 2) = std::sqrt(ck.gamma_l[1]) * bbar * nbar;
  six.noise_map(4, 1) = std::sqrt(ck.gamma_l[1]) * bbar * nbar;
  six.noise_map(5, 2) = std::sqrt(ck.gamma_l[1]) * std::conj(bbar) * nbar;
  six.channels = {{"y_in", 0.5, 0.5, {}},
                  {"y_in_b", 0.5, 0.5, std::string("bbar")},
                  {"y_in_bdag", 0.5, 0.5, std::string("bbar")}};
  six.drive = Eigen::VectorXcd::Zero(6);
  Eigen::VectorXcd Ac(6);
  Ac << 0, 1, -1, 0, nbar, -nbar;
  six.drive = -I * 0.5 * ck.alpha * Ac;
  six.decay_rates = (Eigen::VectorXd(6) << ck.gamma_l[0], ck.gamma_l[0], ck.gamma_l[0],
                     ck.gamma_l[1], ck.gamma_l[1], ck.gamma_l[1])
                        .finished();
  six.frame = Frame::normalized;
  six.time_scale = 1.0 / (2.0 * Omega);
  six.means_used = {nbar, mbar, bbar, dbar, 0.0};
  six.validate();

  // reduced 3x3 fluctuation system on {dd, dd†, dm}
  LangevinSystem& r = ck.reduced;
  double gm = ck.gamma_l[0];
  r.basis_labels = {"dd", "dd_dag", "dm"};
  r.M.setZero(3, 3);
  r.M(0, 0) = -I * (1.0 + ck.beta * nbar) - gm;
  r.M(0, 2) = -I * ck.alpha;
  r.M(1, 1) = I * (1.0 + ck.beta * nbar) - gm;
  r.M(1, 2) = I * ck.alpha;
  r.M(2, 0) = 2.0 * I * ck.alpha;
  r.M(2, 1) = -2.0 * I * ck.alpha;
  r.M(2, 2) = -gm;
  r.noise_map.setZero(3, 3);
  r.noise_map(0, 0) = std::sqrt(gm) * bbar;
  r.noise_map(1, 1) = std::sqrt(gm) * std::conj(bbar);
  r.noise_map(2, 0) = std::sqrt(gm) * std::conj(bbar);
  r.noise_map(2, 1) = std::sqrt(gm) * bbar;
  r.channels = {{"y_in", 0.5, 0.5, {}}, {"y_in_dag", 0.5, 0.5, {}},
                {"y_quad", 0.5, 0.5, {}}};
  // third channel of the printed map folds into the first two columns
  r.channels.pop_back();
  r.noise_map.conservativeResize(3, 2);
  r.drive = Eigen::VectorXcd::Zero(3);
  r.decay_rates = (Eigen::VectorXd(3) << gm, gm, gm).finished();
  r.frame = Frame::normalized;
  r.time_scale = 1.0 / (2.0 * Omega);
  r.means_used = {nbar, mbar, bbar, dbar, 0.0};
  r.validate();
  return ck;
}

/// Extends the cross-Kerr block chain to `blocks` copies (3*blocks dim),
/// with the B superdiagonal; used by the truncation-exactness oracle.
inline Eigen::MatrixXcd cross_kerr_extended(const CrossKerrSystem& ck, int blocks) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(3 * blocks, 3 * blocks);
  for (int j = 0; j < blocks; ++j) {
    double gl = (ck.gamma_l.size() > std::size_t(j)) ? ck.gamma_l[j]
               : ck.gamma_l[0] + j * (ck.gamma_l[1] - ck.gamma_l[0]);
    M.block<3, 3>(3 * j, 3 * j) = I * ck.A - gl * Eigen::Matrix3cd::Identity();
    if (j + 1 < blocks) M.block<3, 3>(3 * j, 3 * (j + 1)) = I * ck.B;
  }
  return M;
}

/// Solves the two Sylvester-type block equations for U, V and returns the
/// 9-dim transformed matrix Q^-1 (iM - G) Q whose upper-right 6x3 block must
/// vanish when the reduction is exact.
struct CrossKerrReduction {
  Eigen::Matrix3cd U, V;
  Eigen::MatrixXcd transformed;  // 9x9
  double coupling_norm = 0.0;
};

inline CrossKerrReduction cross_kerr_reduction(const CrossKerrSystem& ck) {
  using M3 = Eigen::Matrix3cd;
  const M3 A = ck.A, B = ck.B;
  const M3 Id = M3::Identity();
  auto g1 = ck.gamma_l[0], g2 = ck.gamma_l[1], g3 = ck.gamma_l[2];

  auto solve_sylvester = [&](const M3& rhs, double gl, double gr) -> M3 {
    // i(A X - X A) - gl X + gr X = -i rhs   (for the V equation rhs = B)
    Eigen::MatrixXcd K(9, 9);
    K.setZero();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        int row = 3 * r + c;
        for (int k = 0; k < 3; ++k) {
          K(row, 3 * k + c) += I * A(r, k);   // A X
          K(row, 3 * r + k) -= I * A(k, c);   // X A
        }
        K(row, row) += (gr - gl);
      }
    Eigen::VectorXcd b(9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b(3 * r + c) = -I * rhs(r, c);
    Eigen::VectorXcd x = K.fullPivLu().solve(b);
    M3 X;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) X(r, c) = x(3 * r + c);
    return X;
  };

  CrossKerrReduction red;
  red.V = solve_sylvester(B, g2, g3);
  red.U = solve_sylvester(B * red.V, g1, g3);

  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(9, 9);
  Q.block<3, 3>(0, 6) = red.U;
  Q.block<3, 3>(3, 6) = red.V;
  Eigen::MatrixXcd Qi = Eigen::MatrixXcd::Identity(9, 9);
  Qi.block<3, 3>(0, 6) = -red.U;
  Qi.block<3, 3>(3, 6) = -red.V;

  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(9, 9);
  L.block<3, 3>(0, 0) = I * A - g1 * Id;
  L.block<3, 3>(0, 3) = I * B;
  L.block<3, 3>(3, 3) = I * A - g2 * Id;
  L.block<3, 3>(3, 6) = I * B;
  L.block<3, 3>(6, 6) = I * A - g3 * Id;

  red.transformed = Qi * L * Q;
  red.coupling_norm = red.transformed.block(0, 6, 6, 3).norm();
  return red;
}

/// Anharmonic (Kerr) oscillator, 8-dim basis {c, c†, n, n², c², c†², nc, c†n}.
/// The matrix is generated symbolically from the quartic Hamiltonian; each
/// basis operator of total ladder degree p damps at p*Gamma2/4.
inline LangevinSystem build_anharmonic(double omega, double zeta, double Gamma2, double nbar) {
  if (nbar < 0) throw std::invalid_argument("build_anharmonic: negative nbar");
  auto ops = OpSet::one_mode();
  auto& c = ops.c;
  auto& cd = ops.cd;
  auto& n = ops.n;
  auto n2 = multiply(n, n);
  auto c2 = multiply(c, c);
  auto cd2 = multiply(cd, cd);
  auto nc = multiply(n, c);
  auto cdn = multiply(cd, n);
  std::vector<OperatorPolynomial> basis = {c, cd, n, n2, c2, cd2, nc, cdn};

  OperatorPolynomial H =
      (omega - 3.0 * zeta) * n - 3.0 * zeta * n2 -
      2.0 * zeta * (c2 + cd2 + 3.0 * (c + cd)) - 4.0 * zeta * (nc + cdn);

  MeanMap means{{"a", nbar}};
  auto gen = generate_langevin(H, basis, {}, means);
  if (gen.max_fit_residual > 1e-9)
    throw std::runtime_error("build_anharmonic: basis projection residual too large");

  LangevinSystem s;
  s.basis_labels = {"c", "c_dag", "n", "n2", "c2", "c_dag2", "nc", "c_dag_n"};
  s.M = gen.M;
  Eigen::VectorXd deg(8);
  deg << 2, 2, 2, 4, 4, 4, 4, 4;
  for (int i = 0; i < 8; ++i) s.M(i, i) -= deg(i) * Gamma2 / 4.0;
  s.noise_map.setZero(8, 2);
  s.noise_map(0, 0) = (nbar + 0.5) * std::sqrt(Gamma2);
  s.noise_map(1, 1) = (nbar + 0.5) * std::sqrt(Gamma2);
  s.channels = {{"c_in", 0.5, 0.5, {}}, {"c_in_dag", 0.5, 0.5, {}}};
  s.drive = gen.drive;
  s.decay_rates = deg * Gamma2 / 4.0;
  s.frame = Frame::absolute;
  s.means_used.n = nbar;
  s.validate();
  return s;
}

/// Single-mode degenerate quantum limited amplifier, basis {n, c, c†}.
inline LangevinSystem build_qla(double omega, cplx g, double Gamma2, double nbar) {
  if (nbar < 0) throw std::invalid_argument("build_qla: negative nbar");
  double th = (2.0 * nbar + 1.0) * Gamma2 / 4.0;
  LangevinSystem s;
  s.basis_labels = {"n", "c", "c_dag"};
  s.M.setZero(3, 3);
  s.M(0, 1) = -2.0 * I * g;
  s.M(0, 2) = 2.0 * I * std::conj(g);
  s.M(1, 0) = -I * std::conj(g);
  s.M(1, 1) = -2.0 * I * omega - th;
  s.M(2, 0) = I * g;
  s.M(2, 2) = 2.0 * I * omega - th;
  s.noise_map.setZero(3, 2);
  s.noise_map(1, 0) = (nbar + 0.5) * std::sqrt(Gamma2);
  s.noise_map(2, 1) = (nbar + 0.5) * std::sqrt(Gamma2);
  s.channels = {{"c_in", 0.5, 0.5, {}}, {"c_in_dag", 0.5, 0.5, {}}};
  s.drive.resize(3);
  s.drive << 0.0, -0.5 * I * std::conj(g), 0.5 * I * g;
  s.decay_rates = (Eigen::VectorXd(3) << 0.0, th, th).finished();
  s.frame = Frame::absolute;
  s.means_used.n = nbar;
  s.validate();
  return s;
}

/// Quantum nondemolition readout, basis {n, m, C, S}: probe quadratures
/// rotate at omega + chi*mbar-like rate; the [C,S] commutator enters in its
/// scalar linearization i/2 (nbar+2)^-1 through the quadrature noise scale.
inline LangevinSystem build_qnd(double omega, double Omega, double chi, double kappa,
                                double Gamma, double nbar, double mbar = 0.0) {
  if (nbar < 0) throw std::invalid_argument("build_qnd: negative nbar");
  double Cbar = std::sqrt(nbar / (nbar + 1.0));
  double rot = omega + chi * mbar;
  LangevinSystem s;
  s.basis_labels = {"n", "m", "C", "S"};
  s.M.setZero(4, 4);
  s.M(0, 0) = -kappa;
  s.M(1, 1) = -Gamma;
  s.M(2, 2) = -0.5 * kappa;
  s.M(2, 3) = rot;
  s.M(3, 1) = -chi * Cbar;
  s.M(3, 2) = -rot;
  s.M(3, 3) = -0.5 * kappa;
  double q = 1.0 / std::sqrt(nbar + 1.0);
  s.noise_map.setZero(4, 4);
  s.noise_map(0, 0) = std::sqrt(kappa * nbar);
  s.noise_map(0, 1) = std::sqrt(kappa * nbar);
  s.noise_map(1, 2) = std::sqrt(Gamma) * std::sqrt(mbar + 1.0);
  s.noise_map(1, 3) = std::sqrt(Gamma) * std::sqrt(mbar + 1.0);
  s.noise_map(2, 0) = 0.5 * std::sqrt(kappa) * q;
  s.noise_map(2, 1) = 0.5 * std::sqrt(kappa) * q;
  s.noise_map(3, 0) = -0.5 * I * std::sqrt(kappa) * q;
  s.noise_map(3, 1) = 0.5 * I * std::sqrt(kappa) * q;
  s.channels = detail::optical_mech_channels(mbar);
  s.drive = Eigen::VectorXcd::Zero(4);
  s.decay_rates = (Eigen::VectorXd(4) << kappa, Gamma, 0.5 * kappa, 0.5 * kappa).finished();
  s.frame = Frame::absolute;
  s.means_used = {nbar, mbar, 0.0, 0.0, 0.0};
  s.validate();
  return s;
}

}  // namespace hoops
