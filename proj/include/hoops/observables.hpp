#pragma once

// Closed-form and eigenvalue-based nonlinear observables: side-band
// inequivalence (eigen / harmonic-balance), spring effect, amplitude
// asymmetry, breather line spectra.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hoops/models.hpp"

namespace hoops {

enum class SidebandMethod { eigen, harmonic_balance, time_domain };
enum class SidebandRegime { linear, weak, strong };

struct SidebandResult {
  double delta = 0.0;       // inequivalence, angular
  double delta_norm = 0.0;  // delta / Omega
  SidebandMethod method = SidebandMethod::eigen;
  SidebandRegime regime = SidebandRegime::linear;
  double nbar_used = 0.0, mbar_used = 0.0;
  bool assignment_ambiguous = false;
  std::array<cplx, 3> eta{};  // eigen method: matched eigenvalue shifts
};

struct SpringResult {
  double dOmega = 0.0, dGamma = 0.0;  // mechanical shift / damping change
  double domega = 0.0, dkappa = 0.0;  // optical counterparts
  bool corrected = false;
};

namespace detail {

inline SidebandRegime classify_regime(double nbar, double nbar_max) {
  if (nbar < 0.1 * nbar_max) return SidebandRegime::linear;
  if (nbar > 10.0 * nbar_max) return SidebandRegime::strong;
  return SidebandRegime::weak;
}

struct HbConstants {
  cplx A, C;
  double B, D;
  double alpha, beta, theta, psi;  // dimensionless forms
};

inline HbConstants hb_constants(const OptomechParams& p) {
  HbConstants k;
  double O = p.Omega, G = p.Gamma, g0 = p.g0, gam = p.gamma_total();
  k.A = G * (2.0 * I * O - p.kappa);
  k.B = 4.0 * g0 * g0 * (O - 0.5 * G) * (O - 0.5 * G) / (O * O + 0.25 * G * G);
  k.C = cplx(2.0 * O, gam);
  k.D = 4.0 * g0 * g0 * O / (O * O + 0.25 * G * G);
  k.alpha = 4.0 * g0 * g0 / (G * G);
  k.beta = 2.0 * g0 * g0 / (O * O);
  k.theta = gam / (2.0 * O);
  k.psi = G * G / (2.0 * O * O);
  return k;
}

}  // namespace detail

/// Eigenvalue route: the reduced 3x3 system with f+- = g0(mbar+1/2) +- g0/2,
/// G = g0 nbar, s = 0.  Eigenvalues are matched against the free-running set
/// {i kappa/2, -Omega + i gamma/2, Omega + i gamma/2} (shifted by -Delta) by
/// exhaustive nearest assignment; delta = -Re[eta2 + eta3].
inline SidebandResult sideband_eigen(const OptomechParams& p, double nbar, double mbar) {
  p.validate();
  double g0 = p.g0, gam = p.gamma_total();
  double G = g0 * nbar;
  double fp = g0 * (mbar + 0.5) + 0.5 * g0;
  double fm = g0 * (mbar + 0.5) - 0.5 * g0;
  Eigen::Matrix3cd M;
  M << I * p.Delta - 0.5 * p.kappa, I * g0, I * g0,
      I * (G + fp), -I * (p.Omega - p.Delta) - 0.5 * gam, 0,
      -I * (G - fm), 0, I * (p.Omega + p.Delta) - 0.5 * gam;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(M, false);

  std::array<cplx, 3> eta;
  for (int j = 0; j < 3; ++j) eta[j] = es.eigenvalues()(j) / I - p.Delta;
  std::array<cplx, 3> target = {cplx(0.0, 0.5 * p.kappa) - p.Delta,
                                cplx(-p.Omega, 0.5 * gam) - p.Delta,
                                cplx(p.Omega, 0.5 * gam) - p.Delta};
  std::array<int, 3> perm = {0, 1, 2}, best_perm = perm;
  double best = std::numeric_limits<double>::infinity(), second = best;
  std::sort(perm.begin(), perm.end());
  do {
    double d = 0;
    for (int j = 0; j < 3; ++j) d += std::abs(eta[perm[j]] - target[j]);
    if (d < best) {
      second = best;
      best = d;
      best_perm = perm;
    } else if (d < second) {
      second = d;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  SidebandResult r;
  r.method = SidebandMethod::eigen;
  r.nbar_used = nbar;
  r.mbar_used = mbar;
  r.assignment_ambiguous = (second - best) < 1e-12 * std::max(1.0, best);
  for (int j = 0; j < 3; ++j) r.eta[j] = eta[best_perm[j]];
  r.delta = -(r.eta[1] + r.eta[2]).real();
  r.delta_norm = r.delta / p.Omega;
  auto k = detail::hb_constants(p);
  r.regime = detail::classify_regime(nbar, 1.0 / k.beta);
  return r;
}

/// Eigenvalue-route resonance shifts (same matrix as sideband_eigen).
inline SpringResult resonance_shift_eigen(const OptomechParams& p, double nbar, double mbar) {
  auto r = sideband_eigen(p, nbar, mbar);
  SpringResult s;
  s.dOmega = -0.5 * (r.eta[1] - r.eta[2]).real() - p.Omega;
  s.domega = -0.5 * (r.eta[1] + r.eta[2]).real();
  s.dGamma = (-2.0 * r.eta[0] + r.eta[1] + r.eta[2]).imag() - p.Gamma;
  s.dkappa = 2.0 * r.eta[0].imag() - p.kappa;
  return s;
}

/// Harmonic-balance inequivalence,
///   delta(n) = [2 Gamma^2 Omega + 2 Omega (B - Gamma D) n] / (|C|^2 - 4 Omega D n + D^2 n^2).
inline SidebandResult sideband_hb(const OptomechParams& p, double nbar) {
  p.validate();
  auto k = detail::hb_constants(p);
  double num = 2.0 * p.Gamma * p.Gamma * p.Omega + 2.0 * p.Omega * (k.B - p.Gamma * k.D) * nbar;
  double den = std::norm(k.C) - 4.0 * p.Omega * k.D * nbar + k.D * k.D * nbar * nbar;
  SidebandResult r;
  r.method = SidebandMethod::harmonic_balance;
  r.nbar_used = nbar;
  r.delta = num / den;
  r.delta_norm = r.delta / p.Omega;
  r.regime = detail::classify_regime(nbar, 1.0 / k.beta);
  return r;
}

/// Dimensionless form psi Omega (1 + alpha n)/(theta^2 + (1 - beta n)^2);
/// shares its optimum with sideband_hb in the side-band-resolved limit.
inline double sideband_normalized(const OptomechParams& p, double nbar) {
  auto k = detail::hb_constants(p);
  double u = 1.0 - k.beta * nbar;
  return p.Omega * k.psi * (1.0 + k.alpha * nbar) / (k.theta * k.theta + u * u);
}

struct SidebandOptimum {
  double nbar_max = 0.0;   // exact closed form
  double delta_max = 0.0;  // value of the normalized form at nbar_max
  double nbar_max_approx = 0.0;   // Omega^2 / 2 g0^2
  double delta_max_approx = 0.0;  // 4 Omega^3 / gamma^2
};

inline SidebandOptimum sideband_optimum(const OptomechParams& p) {
  auto k = detail::hb_constants(p);
  if (k.theta >= 1.0)
    throw std::invalid_argument("sideband_optimum: requires gamma/2Omega < 1");
  SidebandOptimum o;
  double a = k.alpha, b = k.beta, th = k.theta;
  o.nbar_max = std::sqrt((a + b) * (a + b) + a * a * th * th) / (a * b) - 1.0 / a;
  o.delta_max = sideband_normalized(p, o.nbar_max);
  o.nbar_max_approx = p.Omega * p.Omega / (2.0 * p.g0 * p.g0);
  double gam = p.gamma_total();
  o.delta_max_approx = 4.0 * std::pow(p.Omega, 3) / (gam * gam);
  return o;
}

/// Spring effect at probe frequency w and detuning Delta, from the mechanical
/// response  Sigma(w, Delta) = 2 Omega g0^2 [ ((Delta+w) + i kappa/2)^-1
/// + ((Delta-w) - i kappa/2)^-1 ] (nbar + mu) with shifts
/// dOmega = Re[Sigma]/2w, dGamma = -Im[Sigma]/w.  The corrected form takes
/// mu(w) = (w + i Gamma/2)(mbar + 1/2)/Omega + 1/2, else mu = 0.
inline SpringResult spring_effect(const OptomechParams& p, double w, double Delta, double nbar,
                                  double mbar, bool corrected) {
  if (w <= 0) throw std::invalid_argument("spring_effect: w must be positive");
  double g0 = p.g0, k = p.kappa, O = p.Omega;
  cplx lor = 1.0 / ((Delta + w) + 0.5 * I * k) + 1.0 / ((Delta - w) - 0.5 * I * k);
  cplx mu = corrected ? cplx((w / O) * (mbar + 0.5) + 0.5,
                             (p.Gamma / (2.0 * O)) * (mbar + 0.5))
                      : cplx(0.0);
  cplx Sigma = 2.0 * O * g0 * g0 * lor * (nbar + mu);
  SpringResult s;
  s.corrected = corrected;
  s.dOmega = 0.5 / w * Sigma.real();
  s.dGamma = -1.0 / w * Sigma.imag();
  return s;
}

/// Normalized side-band amplitude asymmetry
///   N(n) = psi (1 + alpha n) / (theta^2 + (1 - beta n)^2),
/// plus the population difference estimate n_r - n_b ~ (n/Omega) delta.
struct AsymmetryResult {
  double N = 0.0;
  double population_diff = 0.0;
};

inline AsymmetryResult amplitude_asymmetry(const OptomechParams& p, double nbar) {
  auto k = detail::hb_constants(p);
  double u = 1.0 - k.beta * nbar;
  AsymmetryResult r;
  r.N = k.psi * (1.0 + k.alpha * nbar) / (k.theta * k.theta + u * u);
  r.population_diff = nbar / p.Omega * sideband_hb(p, nbar).delta;
  return r;
}

// ---------------------------------------------------------------------------
// Akhmediev-breather line spectrum (oscillatory-wave branch iota > 1)

struct BreatherSpectrum {
  std::map<int, cplx> f;          // harmonic coefficients
  std::map<int, double> line_w;   // line positions w = delta/2 + nu * varpi
  double delta = 0.0;             // side-band inequivalence theta^2 |Delta|
  double varpi = 0.0;             // spring-shifted mechanical frequency
  double zeta_minus = 0.0;
  double thd = 0.0;
  double I1_over_I0 = 0.0;
};

/// Harmonic coefficients of h(e^{i varpi t}),
///   h(z) = (z + i varkappa) / ((z - i zeta+)(z - i zeta-)),
/// from residue calculus:
///   nu <= -1:  f_nu = -(zeta- + vk)(i zeta-)^{-nu-1} / (2 iota varpi)
///   nu >=  0:  f_nu = -(zeta+ + vk)(i zeta-)^{ nu+1} / (2 iota varpi).
inline BreatherSpectrum breather_spectrum(const OptomechParams& p, double iota,
                                          double theta_override, int nu_max) {
  if (iota <= 1.0)
    throw std::domain_error("breather_spectrum: iota <= 1 is the soliton branch; "
                            "use the time-domain path");
  if (p.Delta == 0.0)
    throw std::invalid_argument("breather_spectrum: requires non-zero detuning");
  BreatherSpectrum out;
  double g = p.Omega / iota;  // iota ~ Omega/g
  double O = p.Omega, kk = p.kappa;
  double dOm = -2.0 * g * g * p.Delta * (O * O - 0.25 * kk * kk) /
               std::pow(O * O + 0.25 * kk * kk, 2);
  out.varpi = O + dOm;
  double root = std::sqrt(iota * iota - 1.0);
  double zp = iota + root, zm = -iota + root;
  out.zeta_minus = zm;
  double theta2 = theta_override > 0.0
                      ? theta_override * theta_override
                      : 2.0 * out.varpi / (std::abs(p.Delta) * iota * root);
  out.delta = theta2 * std::abs(p.Delta);
  double sigma = root * (iota * std::abs(p.Delta) + out.varpi);
  double vk = out.varpi / sigma;

  for (int nu = -nu_max; nu <= nu_max; ++nu) {
    cplx val;
    if (nu >= 0)
      val = -(zp + vk) * std::pow(I * zm, nu + 1) / (2.0 * iota * out.varpi);
    else
      val = -(zm + vk) * std::pow(I * zm, -nu - 1) / (2.0 * iota * out.varpi);
    out.f[nu] = val;
    out.line_w[nu] = 0.5 * out.delta + nu * out.varpi;
  }

  double num = 0.0, den = 0.0;
  for (const auto& [nu, val] : out.f) {
    if (std::abs(nu) >= 2) num += std::abs(val);
    if (std::abs(nu) >= 1) den += std::abs(val);
  }
  out.thd = den > 0 ? num / den : 0.0;

  double D = 4.0 * p.g0 * p.g0 * O / (O * O + 0.25 * p.Gamma * p.Gamma);
  double Xi = std::sqrt(2.0) * iota * std::sqrt(theta2) / std::sqrt(D);
  double Lambda =
      Xi * (2.0 * std::abs(p.Delta) * iota * iota - 2.0 * out.varpi * iota - std::abs(p.Delta)) /
      (2.0 * iota);
  double Psi = 2.0 * Xi * sigma;
  double I0 = std::abs(Lambda / (2.0 * M_PI) + I * Psi * out.f.at(0));
  out.I1_over_I0 = (std::abs(out.f.at(1)) + std::abs(out.f.at(-1))) * Psi / (2.0 * I0);
  return out;
}

}  // namespace hoops
