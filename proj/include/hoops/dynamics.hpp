#pragma once

// Time-domain oracles: seeded Euler-Maruyama integration, deterministic
// exponential propagation, time-dependent (midpoint Magnus) propagation,
// classical nonlinear optomechanics with FFT side-band extraction, and
// stability maps.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "hoops/fft.hpp"
#include "hoops/langevin.hpp"
#include "hoops/models.hpp"
#include "hoops/observables.hpp"
#include "hoops/steady_state.hpp"

namespace hoops {

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  std::uint64_t seed = 0;
  std::string scheme;
};

namespace detail {

inline std::mt19937_64 channel_stream(std::uint64_t master, std::size_t channel) {
  return std::mt19937_64(master + 0x9e3779b97f4a7c15ULL * (channel + 1));
}

}  // namespace detail

/// Euler-Maruyama trajectory of dA = (M A + drive) dt - G dW with complex
/// Wiener increments dW_j = sqrt(S_j) (xi1 + i xi2) sqrt(dt/2) so that
/// <dW* dW> = S_j dt on the channel's symmetrized density.  noise_on = false
/// switches to exact per-step exponential propagation.
inline Trajectory integrate(const LangevinSystem& sys, double T, double dt, std::uint64_t seed,
                            bool noise_on, const Eigen::VectorXcd* A0 = nullptr) {
  sys.validate();
  double emax = 0.0;
  auto ev = sys.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) emax = std::max(emax, std::abs(ev(i)));
  if (dt * emax >= 0.1)
    throw std::invalid_argument("integrate: dt too large for stiffness; need dt < " +
                                std::to_string(0.1 / emax));
  const std::size_t steps = std::size_t(std::llround(T / dt));
  const Eigen::Index d = sys.dim();
  Trajectory tr;
  tr.seed = seed;
  tr.scheme = noise_on ? "euler-maruyama" : "matrix-exponential";
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  Eigen::VectorXcd A = A0 ? *A0 : Eigen::VectorXcd::Zero(d).eval();
  tr.times.push_back(0.0);
  tr.states.push_back(A);

  if (!noise_on) {
    Eigen::MatrixXcd E = (sys.M * dt).exp();
    // drive term integrated exactly through the augmented exponential
    Eigen::VectorXcd dpart = Eigen::VectorXcd::Zero(d);
    if (sys.drive.norm() > 0) {
      Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(d + 1, d + 1);
      aug.topLeftCorner(d, d) = sys.M;
      aug.topRightCorner(d, 1) = sys.drive;
      Eigen::MatrixXcd Ea = (aug * dt).exp();
      dpart = Ea.topRightCorner(d, 1);
    }
    for (std::size_t k = 0; k < steps; ++k) {
      A = E * A + dpart;
      tr.times.push_back((k + 1) * dt);
      tr.states.push_back(A);
    }
    return tr;
  }

  std::vector<std::mt19937_64> rng;
  for (std::size_t j = 0; j < sys.channels.size(); ++j)
    rng.push_back(detail::channel_stream(seed, j));
  std::normal_distribution<double> N01(0.0, 1.0);
  const double amp = std::sqrt(0.5 * dt);
  Eigen::VectorXcd dW(sys.channels.size());
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t j = 0; j < sys.channels.size(); ++j) {
      double s = std::sqrt(sys.channels[j].symmetrized());
      dW(j) = s * cplx(N01(rng[j]), N01(rng[j])) * amp;
    }
    A = A + (sys.M * A + sys.drive) * dt - sys.noise_map * dW;
    tr.times.push_back((k + 1) * dt);
    tr.states.push_back(A);
  }
  return tr;
}

/// Time-dependent propagation with per-step midpoint exponentials (first-order
/// Magnus) and trapezoid drive integrals.
inline Trajectory propagate_time_dependent(
    const std::function<Eigen::MatrixXcd(double)>& Mfun,
    const std::function<Eigen::VectorXcd(double)>& drive, const Eigen::VectorXcd& A0, double T,
    double dt) {
  Trajectory tr;
  tr.scheme = "magnus-midpoint";
  const std::size_t steps = std::size_t(std::llround(T / dt));
  Eigen::VectorXcd A = A0;
  tr.times.push_back(0.0);
  tr.states.push_back(A);
  const Eigen::Index d = A0.size();
  for (std::size_t k = 0; k < steps; ++k) {
    double t0 = k * dt, t1 = (k + 1) * dt, tm = t0 + 0.5 * dt;
    Eigen::VectorXcd dmid = drive ? (0.5 * (drive(t0) + drive(t1))).eval()
                                  : Eigen::VectorXcd::Zero(d).eval();
    Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(d + 1, d + 1);
    aug.topLeftCorner(d, d) = Mfun(tm);
    aug.topRightCorner(d, 1) = dmid;
    Eigen::MatrixXcd E = (aug * dt).exp();
    A = E.topLeftCorner(d, d) * A + E.topRightCorner(d, 1);
    tr.times.push_back(t1);
    tr.states.push_back(A);
  }
  return tr;
}

/// Averaged periodogram of one state component over an ensemble of seeds.
/// Density convention: S(w) = |sum a_n e^{-i w t_n} dt|^2 / T, matching the
/// analytic  sum_j |[(M - iwI)^{-1} G]_{cj}|^2 S_j.
struct Periodogram {
  std::vector<double> freqs;
  std::vector<double> values;
};

inline Periodogram ensemble_periodogram(const LangevinSystem& sys, int component, int n_seeds,
                                        double T, double dt, std::uint64_t seed0,
                                        double discard_fraction = 0.25) {
  Periodogram out;
  std::size_t n = 0;
  for (int s = 0; s < n_seeds; ++s) {
    auto tr = integrate(sys, T, dt, seed0 + s, true);
    std::size_t skip = std::size_t(discard_fraction * tr.states.size());
    std::vector<cplx> buf;
    for (std::size_t k = skip; k < tr.states.size(); ++k)
      buf.push_back(tr.states[k](component));
    // truncate to a power of two for speed
    std::size_t m = 1;
    while (2 * m <= buf.size()) m <<= 1;
    buf.resize(m);
    fft(buf, false);
    if (out.values.empty()) {
      n = m;
      out.values.assign(m, 0.0);
      out.freqs.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        double w = 2.0 * M_PI * double(k) / (double(m) * dt);
        if (k > m / 2) w -= 2.0 * M_PI / dt;
        out.freqs[k] = w;
      }
    }
    double Teff = double(m) * dt;
    for (std::size_t k = 0; k < m; ++k)
      out.values[k] += std::norm(buf[k] * dt) / Teff / double(n_seeds);
  }
  // unwrap to increasing frequency
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.freqs[a] < out.freqs[b]; });
  Periodogram sorted;
  sorted.freqs.reserve(n);
  sorted.values.reserve(n);
  for (auto k : order) {
    sorted.freqs.push_back(out.freqs[k]);
    sorted.values.push_back(out.values[k]);
  }
  return sorted;
}

// ---------------------------------------------------------------------------
// Classical nonlinear optomechanics

struct ClassicalRun {
  Trajectory traj;                 // states: (Upsilon, Phi)
  double w_red = 0.0, w_blue = 0.0;
  double delta_measured = 0.0;
  bool sidebands_found = false;
};

/// Integrates the classical envelope pair
///   dU/dt = (i Delta - kappa/2) U + i g0 U (Phi + Phi*)
///   dPhi/dt = (-i Omega - Gamma/2) Phi + i g0 |U|^2
/// from a kicked equilibrium and measures the side-band pair of the freely
/// rotating envelope by FFT peak interpolation.  The carrier drag doubles the
/// pump-referenced asymmetry, so the reported value is
///   delta_measured = (w_red + w_blue - 2 Delta) / 2.
/// kappa T must stay small for the photon number to hold through the record.
inline ClassicalRun classical_optomech(const OptomechParams& p, double nbar, double T, double dt,
                                       double kick = 0.5, double delta_expected = 0.0) {
  if (delta_expected > 0.0) {
    double bin = 2.0 * M_PI / T;
    if (bin > delta_expected / 20.0)
      throw std::invalid_argument("classical_optomech: FFT resolution too coarse; need T >= " +
                                  std::to_string(40.0 * M_PI / delta_expected));
  }
  cplx U = std::sqrt(nbar);
  cplx Phi = I * p.g0 * nbar / (I * p.Omega + 0.5 * p.Gamma);
  Phi += kick * std::abs(Phi);

  auto rhs = [&](const cplx& u, const cplx& f, cplx& du, cplx& df) {
    du = (I * p.Delta - 0.5 * p.kappa) * u + I * p.g0 * u * (f + std::conj(f));
    df = (-I * p.Omega - 0.5 * p.Gamma) * f + I * p.g0 * std::norm(u);
  };

  const std::size_t steps = std::size_t(std::llround(T / dt));
  ClassicalRun run;
  run.traj.scheme = "rk4";
  std::vector<cplx> us;
  us.reserve(steps);
  const std::size_t keep_every = std::max<std::size_t>(1, steps / (1 << 22));
  for (std::size_t k = 0; k < steps; ++k) {
    cplx k1u, k1f, k2u, k2f, k3u, k3f, k4u, k4f;
    rhs(U, Phi, k1u, k1f);
    rhs(U + 0.5 * dt * k1u, Phi + 0.5 * dt * k1f, k2u, k2f);
    rhs(U + 0.5 * dt * k2u, Phi + 0.5 * dt * k2f, k3u, k3f);
    rhs(U + dt * k3u, Phi + dt * k3f, k4u, k4f);
    U += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    Phi += dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    us.push_back(U);
    if (k % keep_every == 0) {
      run.traj.times.push_back((k + 1) * dt);
      Eigen::VectorXcd st(2);
      st << U, Phi;
      run.traj.states.push_back(st);
    }
  }

  // spectrum of the settled part of the record
  std::size_t m = 1;
  while (2 * m <= (3 * us.size()) / 4) m <<= 1;
  std::vector<cplx> buf(m);
  for (std::size_t k = 0; k < m; ++k) buf[k] = us[us.size() - m + k];
  fft(buf, false);
  std::vector<double> power(m);
  for (std::size_t k = 0; k < m; ++k) power[k] = std::norm(buf[k]);

  auto bin_freq = [&](std::size_t k) {
    double w = 2.0 * M_PI * double(k) / (double(m) * dt);
    if (k > m / 2) w -= 2.0 * M_PI / dt;
    return w;
  };
  // locate the dominant peak in each half window around +-varpi; a real line
  // must stand far above the window median
  auto find_peak = [&](double lo, double hi, double& wpk) -> bool {
    double best = -1.0;
    std::size_t kb = 0;
    std::vector<double> win;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      double w = bin_freq(k);
      if (w < lo || w > hi) continue;
      win.push_back(power[k]);
      if (power[k] > best) {
        best = power[k];
        kb = k;
      }
    }
    if (best <= 0.0 || win.size() < 8) return false;
    std::nth_element(win.begin(), win.begin() + win.size() / 2, win.end());
    double median = win[win.size() / 2];
    if (best < 30.0 * median) return false;
    std::size_t km = (kb + m - 1) % m, kp = (kb + 1) % m;
    double off = parabolic_peak_offset(power[km], power[kb], power[kp]);
    wpk = bin_freq(kb) + off * 2.0 * M_PI / (double(m) * dt);
    return true;
  };
  double wp = 0, wm = 0;
  bool okp = find_peak(p.Delta + 0.5 * p.Omega, p.Delta + 1.5 * p.Omega, wp);
  bool okm = find_peak(p.Delta - 1.5 * p.Omega, p.Delta - 0.5 * p.Omega, wm);
  run.sidebands_found = okp && okm;
  if (run.sidebands_found) {
    run.w_red = wp;
    run.w_blue = wm;
    run.delta_measured = 0.5 * (wp + wm - 2.0 * p.Delta);
  }
  return run;
}

// ---------------------------------------------------------------------------
// Stability maps

enum class StabilityPhase { LS_NS, LU_NS, LS_NU, LU_NU };

inline const char* phase_name(StabilityPhase ph) {
  switch (ph) {
    case StabilityPhase::LS_NS: return "LS/NS";
    case StabilityPhase::LU_NS: return "LU/NS";
    case StabilityPhase::LS_NU: return "LS/NU";
    default: return "LU/NU";
  }
}

struct StabilityMap {
  std::vector<double> detunings;
  std::vector<double> powers;  // |alpha|^2 photon-flux units
  // row-major [i_detuning * powers.size() + j]
  std::vector<double> max_re_lin4, max_re_ho3, max_re_ho5;
  std::vector<double> nbar_cell;
  std::vector<StabilityPhase> phase;
  std::vector<bool> cell_ok;
  double n_cr_extracted = std::numeric_limits<double>::quiet_NaN();
  double n_cr_formula = std::numeric_limits<double>::quiet_NaN();
};

inline StabilityMap stability_map(OptomechParams p, const std::vector<double>& detunings,
                                  const std::vector<double>& alpha2) {
  StabilityMap map;
  map.detunings = detunings;
  map.powers = alpha2;
  std::size_t n = detunings.size() * alpha2.size();
  map.max_re_lin4.assign(n, 0.0);
  map.max_re_ho3.assign(n, 0.0);
  map.max_re_ho5.assign(n, 0.0);
  map.nbar_cell.assign(n, 0.0);
  map.phase.assign(n, StabilityPhase::LS_NS);
  map.cell_ok.assign(n, true);

  double C0 = p.g0 * p.g0 / (p.kappa * p.Gamma);
  map.n_cr_formula = 4.0 / C0 * std::pow(p.Omega / p.kappa, 2);

  double n_cr = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    for (std::size_t j = 0; j < alpha2.size(); ++j) {
      std::size_t idx = i * alpha2.size() + j;
      p.Delta = detunings[i];
      p.alpha = std::sqrt(alpha2[j]);
      try {
        auto roots = photon_number_cubic(p);
        // lowest stable branch, else lowest branch
        const SteadyState* pick = nullptr;
        for (const auto& r : roots)
          if (r.stable) { pick = &r; break; }
        if (!pick) pick = &roots.front();
        double nb = pick->nbar;
        map.nbar_cell[idx] = nb;
        auto ph = coherent_phonons(p, p.Delta, nb);
        auto lin = build_linearized_optomech(p, nb);
        auto ho3 = build_second_order_optomech(p, nb, ph.mbar, pick->bbar, 3);
        auto ho5 = build_second_order_optomech(p, nb, ph.mbar, pick->bbar, 5);
        map.max_re_lin4[idx] = lin.max_real_eigenvalue();
        map.max_re_ho3[idx] = ho3.max_real_eigenvalue();
        map.max_re_ho5[idx] = ho5.max_real_eigenvalue();
        bool lin_stable = map.max_re_lin4[idx] < 0.0;
        bool nl_stable = map.max_re_ho5[idx] < 0.0;
        map.phase[idx] = lin_stable ? (nl_stable ? StabilityPhase::LS_NS : StabilityPhase::LS_NU)
                                    : (nl_stable ? StabilityPhase::LU_NS : StabilityPhase::LU_NU);
        if (!nl_stable) n_cr = std::min(n_cr, nb);
      } catch (const std::exception&) {
        map.cell_ok[idx] = false;
      }
    }
  }
  if (std::isfinite(n_cr)) map.n_cr_extracted = n_cr;
  return map;
}

}  // namespace hoops
