#pragma once

// Nonlinear algebraic steady states for the model catalog, with branch
// tracking.  Polynomial roots go through companion-matrix eigenvalues.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hoops/models.hpp"

namespace hoops {

struct SteadyState {
  double nbar = 0.0;
  double mbar = 0.0;
  cplx bbar = 0.0;
  cplx dbar = 0.0;
  double drive_phase = 0.0;
  int branch = 0;
  bool stable = true;
  double residual = 0.0;    // defining-equation residual, relative
  double diagnostic = 0.0;  // magnitude of dropped (imaginary/half-quantum) parts
};

/// Real roots of a polynomial sum_k coeffs[k] x^k via the companion matrix.
inline std::vector<double> real_roots(const std::vector<double>& coeffs,
                                      double imag_tol = 1e-9) {
  int n = int(coeffs.size()) - 1;
  while (n > 0 && coeffs[n] == 0.0) --n;
  if (n <= 0) return {};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -coeffs[i] / coeffs[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  std::vector<double> roots;
  double scale = 0.0;
  for (int i = 0; i <= n; ++i) scale = std::max(scale, std::abs(coeffs[i]));
  for (int i = 0; i < n; ++i) {
    auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) < imag_tol * std::max(1.0, std::abs(z.real()))) roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace detail {

inline double cubic_radiation_coeff(const OptomechParams& p) {
  return 2.0 * p.g0 * p.g0 * p.Omega / (p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma);
}

}  // namespace detail

/// All non-negative roots nbar of
///   |alpha|^2 = [kappa^2/4 + (B nbar + Delta)^2] nbar,  B = 2 g0^2 Omega/(Omega^2+Gamma^2/4),
/// sorted ascending, each with bbar, the drive phase and a linearized
/// stability flag.
inline std::vector<SteadyState> photon_number_cubic(const OptomechParams& p) {
  p.validate();
  double a2 = std::norm(p.alpha);
  std::vector<SteadyState> out;
  if (a2 == 0.0) {
    SteadyState s;
    s.nbar = 0.0;
    s.bbar = 0.0;
    s.stable = true;
    out.push_back(s);
    return out;
  }
  double B = detail::cubic_radiation_coeff(p);
  // B^2 n^3 + 2 B Delta n^2 + (Delta^2 + kappa^2/4) n - |alpha|^2 = 0
  std::vector<double> roots;
  if (p.g0 == 0.0) {
    roots = {a2 / (p.Delta * p.Delta + 0.25 * p.kappa * p.kappa)};
  } else {
    roots = real_roots({-a2, p.Delta * p.Delta + 0.25 * p.kappa * p.kappa, 2.0 * B * p.Delta,
                        B * B});
  }
  int branch = 0;
  for (double n : roots) {
    if (n < -1e-12) continue;
    n = std::max(n, 0.0);
    SteadyState s;
    s.nbar = n;
    s.branch = branch++;
    s.bbar = I * p.g0 * n / (I * p.Omega + 0.5 * p.Gamma);
    cplx alpha_c = std::sqrt(n) * cplx(-0.5 * p.kappa, p.Delta + B * n);
    s.drive_phase = std::arg(alpha_c);
    double lhs = (0.25 * p.kappa * p.kappa + std::pow(B * n + p.Delta, 2)) * n;
    s.residual = std::abs(lhs - a2) / std::max(1.0, a2);
    auto lin = build_linearized_optomech(p, n);
    s.stable = lin.stable();
    out.push_back(s);
  }
  return out;
}

/// Detuning at which bistability sets in for the given drive: the negative
/// real root of -D (D^2 + 9 kappa^2/4) = 27 g0^2 Omega |alpha|^2/(Omega^2+Gamma^2/4).
inline double bistability_onset_detuning(const OptomechParams& p) {
  double rhs = 27.0 * p.g0 * p.g0 * p.Omega * std::norm(p.alpha) /
               (p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma);
  // x^3 + (9 kappa^2/4) x + rhs = 0
  auto roots = real_roots({rhs, 9.0 * p.kappa * p.kappa / 4.0, 0.0, 1.0});
  for (double r : roots)
    if (r < 0) return r;
  throw std::runtime_error("bistability_onset_detuning: no negative real root");
}

/// Discriminant of the photon-number cubic at the given detuning; vanishes on
/// the boundary of the bistable window (double roots).
inline double photon_cubic_discriminant(const OptomechParams& p) {
  double B = detail::cubic_radiation_coeff(p);
  double a = B * B, b = 2.0 * B * p.Delta, c = p.Delta * p.Delta + 0.25 * p.kappa * p.kappa,
         d = -std::norm(p.alpha);
  return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c -
         27 * a * a * d * d;
}

/// Detuning window (outer, inner) with three steady branches at the given
/// drive, located as the discriminant zeros bracketing the onset locus.
inline std::pair<double, double> bistability_window(const OptomechParams& p) {
  double Db = bistability_onset_detuning(p);
  OptomechParams q = p;
  auto disc = [&](double D) {
    q.Delta = D;
    return photon_cubic_discriminant(q);
  };
  if (disc(Db) <= 0.0)
    throw std::runtime_error("bistability_window: no bistable window at this drive");
  auto bisect = [&](double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if ((disc(lo) > 0.0) == (disc(mid) > 0.0)) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double outer = Db, step = std::abs(Db);
  while (disc(outer) > 0.0) outer -= step;
  double inner = Db;
  while (disc(inner) > 0.0 && inner < 0.0) inner += std::min(step, -inner * 0.5) + 1e-18;
  return {bisect(Db, outer), bisect(Db, inner)};
}

struct CoherentPhonons {
  double mbar = 0.0;
  cplx ab = 0.0;        // steady <a b>
  cplx ab_conj = 0.0;   // steady <a b†>
  double diagnostic = 0.0;
};

/// Coherent phonon population, principal closed form
///   mbar = 32 g0^2 Omega^2 (gamma^2 + gamma Gamma + 4 Delta^2)
///          / [(gamma^2 + 4 Delta^2)(Gamma^2 + 4 Omega^2)^2] * nbar^2,
/// clamped non-negative; the dropped detuning correction is reported as a
/// diagnostic magnitude.
inline CoherentPhonons coherent_phonons(const OptomechParams& p, double Delta, double nbar) {
  if (nbar < 0) throw std::invalid_argument("coherent_phonons: negative nbar");
  double gamma = p.gamma_total(), Gamma = p.Gamma, O = p.Omega, g0 = p.g0;
  double den1 = gamma * gamma + 4.0 * Delta * Delta;
  double den2 = std::pow(Gamma * Gamma + 4.0 * O * O, 2);
  CoherentPhonons r;
  double principal =
      32.0 * g0 * g0 * O * O * (gamma * gamma + gamma * Gamma + 4.0 * Delta * Delta) /
      (den1 * den2) * nbar * nbar;
  r.mbar = std::max(0.0, principal);
  r.diagnostic = std::abs(2.0 * Delta * O / den1);

  // steady intermediates of the reduced higher-order system
  double k = p.kappa;
  cplx alpha = std::sqrt(nbar) *
               cplx(-0.5 * k, Delta + detail::cubic_radiation_coeff(p) * nbar);
  double rn = std::sqrt(nbar);
  cplx den = 4.0 * g0 * (gamma - 2.0 * I * Delta);
  if (g0 > 0.0) {
    r.ab = (I * rn * (g0 * g0 * (8.0 * nbar + 4.0) +
                      (2.0 * Delta + I * k) * (2.0 * (Delta + O) + I * gamma)) -
            2.0 * I * alpha *
                (8.0 * Gamma * g0 * g0 * nbar / (Gamma * Gamma + 4.0 * O * O) + gamma -
                 2.0 * I * (Delta + O))) /
           den;
    r.ab_conj = (2.0 * alpha *
                     (8.0 * I * Gamma * g0 * g0 * nbar / (Gamma * Gamma + 4.0 * O * O) -
                      I * gamma - 2.0 * Delta + 2.0 * O) -
                 rn * (4.0 * I * g0 * g0 * (2.0 * nbar + 1.0) +
                       (k - 2.0 * I * Delta) * (I * gamma + 2.0 * Delta - 2.0 * O))) /
                den;
  }
  return r;
}

/// Quadratic-model steady state: joint non-negative solution of
///   |alpha|^2 = eps^2 (1+rho)^2 mbar^2 nbar,
///   nbar |alpha|^2 = eps^2 (mbar^2 - mbar),
/// with 4|dbar|^2 = mbar^2 - mbar.  Off-resonant case.  Strong near-resonant
/// pumping saturates nbar at (1+rho)^-1.
inline std::optional<SteadyState> quadratic_steady_state(const QuadraticParams& p) {
  double a2 = std::norm(p.alpha);
  SteadyState s;
  if (a2 == 0.0) {
    s.nbar = 0.0;
    s.mbar = 0.0;
    return s;
  }
  double rho = p.rho(), eps = p.eps;
  double W = a2 / (eps * eps * (1.0 + rho) * (1.0 + rho));  // mbar^2 nbar
  double Q = a2 / (eps * eps);                              // mbar^2 - mbar = Q nbar
  // (W - Q n^2)^2 = W n, rescaled by W^2 for conditioning:
  //   r2^2 n^4 - 2 r2 n^2 - n/W + 1 = 0  with r2 = (1+rho)^2
  double r2 = (1.0 + rho) * (1.0 + rho);
  auto roots = real_roots({1.0, -1.0 / W, -2.0 * r2, 0.0, r2 * r2}, 1e-7);
  // polish each candidate on the monotone balance
  //   sqrt(W/n) = (1 + sqrt(1 + 4 Q n)) / 2
  auto balance = [&](double n) {
    return std::sqrt(W / n) - 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * Q * n));
  };
  for (double& n : roots) {
    if (n <= 0.0) continue;
    double lo = 0.97 * n, hi = 1.03 * n;
    if (balance(lo) < 0.0 || balance(hi) > 0.0) continue;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (balance(mid) > 0.0) lo = mid; else hi = mid;
    }
    n = 0.5 * (lo + hi);
  }
  std::optional<SteadyState> best;
  for (double n : roots) {
    if (n <= 0.0) continue;
    double m = W / n - Q * n;
    if (m < 1.0) continue;  // mbar^2 - mbar must be non-negative on the driven branch
    SteadyState cand;
    cand.nbar = n;
    cand.mbar = m;
    cand.dbar = 0.5 * std::sqrt(std::max(0.0, m * m - m));
    double r1 = std::abs(eps * eps * (1 + rho) * (1 + rho) * m * m * n - a2) / a2;
    double r2 = std::abs(eps * eps * (m * m - m) - n * a2) / std::max(n * a2, 1e-300);
    cand.residual = std::max(r1, r2);
    if (!best || cand.nbar < best->nbar) best = cand;
  }
  return best;
}

/// Cross-Kerr steady state.  Dimensionless inputs alpha = f/Omega,
/// beta = g/Omega, lambda = kappa/2Omega, gamma = Gamma/2Omega, pump xi.
struct CrossKerrSteadyParams {
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double xi = 0.0;
};

struct CrossKerrSteady {
  SteadyState state;
  double bracket = 0.0;  // (mbar / 2|dbar|)^2
  bool unstable_denominator = false;
};

inline double cross_kerr_mbar(const CrossKerrSteadyParams& q, double nbar) {
  double u = 1.0 + q.beta * nbar;
  return 2.0 * q.alpha * q.alpha / (u * u + q.gamma * q.gamma - 4.0 * q.alpha * q.alpha);
}

inline cplx cross_kerr_dbar(const CrossKerrSteadyParams& q, double nbar, double mbar) {
  double u = 1.0 + q.beta * nbar;
  return -I * q.alpha * (mbar + 0.5) / (I * u + q.gamma);
}

inline CrossKerrSteady cross_kerr_steady_state(const CrossKerrSteadyParams& q) {
  CrossKerrSteady out;
  double u0 = 1.0 + 0.0;
  out.unstable_denominator =
      (u0 * u0 + q.gamma * q.gamma - 4.0 * q.alpha * q.alpha) <= 0.0;
  auto mismatch = [&](double n) {
    double m = cross_kerr_mbar(q, n);
    cplx d = cross_kerr_dbar(q, n, m);
    double br = std::pow(m / (2.0 * std::abs(d)), 2);
    return q.lambda * q.lambda * n * br - q.xi * q.xi;
  };
  if (q.xi == 0.0) {
    out.state.nbar = 0.0;
  } else {
    // bracketing root search on nbar
    double lo = 0.0, hi = 1.0;
    while (mismatch(hi) < 0.0 && hi < 1e18) hi *= 2.0;
    if (mismatch(hi) < 0.0) throw std::runtime_error("cross_kerr_steady_state: no root bracket");
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mismatch(mid) < 0.0) lo = mid; else hi = mid;
    }
    out.state.nbar = 0.5 * (lo + hi);
  }
  double n = out.state.nbar;
  double u = 1.0 + q.beta * n;
  if (u * u + q.gamma * q.gamma - 4.0 * q.alpha * q.alpha <= 0.0)
    out.unstable_denominator = true;
  out.state.mbar = cross_kerr_mbar(q, n);
  out.state.dbar = cross_kerr_dbar(q, n, out.state.mbar);
  double ad = std::abs(out.state.dbar);
  out.bracket = ad > 0 ? std::pow(out.state.mbar / (2.0 * ad), 2) : 0.0;
  if (q.xi > 0.0)
    out.state.residual = std::abs(q.lambda * q.lambda * n * out.bracket - q.xi * q.xi) /
                         (q.xi * q.xi);
  return out;
}

}  // namespace hoops
