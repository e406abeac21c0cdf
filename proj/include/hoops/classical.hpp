#pragma once

// Exponential-nonlinearity circuit via power-series truncation and the
// Kuramoto model in cartesian and action-angle forms.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace hoops {

struct CircuitParams {
  double tau = 1.0;    // time constant
  double mu = 1.0;     // linear loss
  double kappa = 1.0;  // diode strength
  double V0 = 0.1;     // drive amplitude
  double alpha_d = 0.05;  // drive decay
  double omega_d = 1.0;   // drive frequency
  int order = 4;          // truncation order K
  double noise = 0.0;

  void validate() const {
    if (tau <= 0 || kappa <= 0) throw std::invalid_argument("circuit: tau, kappa must be positive");
    if (order < 1) throw std::invalid_argument("circuit: truncation order must be >= 1");
  }

  double drive(double t) const { return V0 * std::exp(-alpha_d * t) * std::sin(omega_d * t); }
};

/// Truncated linear system for the moment vector (u, u^2, ..., u^K):
///   tau du^j/dt = -j(mu+kappa) u^j - sum_{k>j} j kappa/(k-j+1)! u^k
///                 + j ubar^{j-1} [v(t) - n(t)].
struct CircuitSystem {
  Eigen::MatrixXd M;       // K x K, includes the 1/tau
  Eigen::VectorXd in_coef; // j ubar^{j-1} / tau
  double ubar = 0.0;
};

inline CircuitSystem build_circuit_system(const CircuitParams& p, double ubar = 0.0) {
  p.validate();
  const int K = p.order;
  CircuitSystem s;
  s.ubar = ubar;
  s.M.setZero(K, K);
  s.in_coef.resize(K);
  for (int j = 1; j <= K; ++j) {
    s.M(j - 1, j - 1) = -double(j) * (p.mu + p.kappa) / p.tau;
    for (int k = j + 1; k <= K; ++k)
      s.M(j - 1, k - 1) = -double(j) * p.kappa / std::tgamma(double(k - j + 1) + 1.0) / p.tau;
    s.in_coef(j - 1) = double(j) * std::pow(ubar, j - 1) / p.tau;
  }
  return s;
}

struct Waveform {
  std::vector<double> times;
  std::vector<double> values;

  double time_average() const {
    if (values.empty()) return 0.0;
    double s = 0;
    for (double v : values) s += v;
    return s / double(values.size());
  }
};

namespace detail {

template <typename State, typename Rhs>
inline void rk4_step(State& y, double t, double dt, const Rhs& rhs) {
  State k1 = rhs(t, y);
  State k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
  State k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
  State k4 = rhs(t + dt, y + dt * k3);
  y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// RK4 solution of the truncated moment system; returns the first moment.
/// With self_consistent_input the drive rows use the state's own moment
/// components j u^{j-1}(t) v(t), which is exact for the deterministic moment
/// chain; otherwise the frozen ubar coefficients of the system are used.
inline Waveform integrate_circuit(const CircuitParams& p, const CircuitSystem& s, double T,
                                  double dt, std::uint64_t seed = 0,
                                  bool self_consistent_input = false) {
  const int K = p.order;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(K);
  Waveform wf;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  const std::size_t steps = std::size_t(std::llround(T / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    double t = k * dt;
    auto rhs = [&](double tt, const Eigen::VectorXd& y) -> Eigen::VectorXd {
      Eigen::VectorXd r = s.M * y;
      double v = p.drive(tt);
      if (self_consistent_input) {
        for (int j = 1; j <= K; ++j)
          r(j - 1) += double(j) * (j >= 2 ? y(j - 2) : 1.0) * v / p.tau;
      } else {
        r += s.in_coef * v;
      }
      return r;
    };
    detail::rk4_step(u, t, dt, rhs);
    if (p.noise > 0.0) u -= s.in_coef * (p.noise * N01(rng) * std::sqrt(dt));
    wf.times.push_back((k + 1) * dt);
    wf.values.push_back(u(0));
  }
  return wf;
}

/// Deterministic truncated solution with the exact moment-chain input.
inline Waveform circuit_truncated(const CircuitParams& p, double T, double dt) {
  auto s = build_circuit_system(p, 0.0);
  return integrate_circuit(p, s, T, dt, 0, true);
}

/// Two-pass frozen-input linearization: integrate with ubar = 0, recompute
/// the time-average of u, re-integrate.  This is the form the stochastic
/// system uses.
inline Waveform circuit_truncated_frozen(const CircuitParams& p, double T, double dt) {
  auto s0 = build_circuit_system(p, 0.0);
  auto w0 = integrate_circuit(p, s0, T, dt);
  auto s1 = build_circuit_system(p, w0.time_average());
  return integrate_circuit(p, s1, T, dt);
}

/// Mean-field oracle: RK4 of tau u' = -mu u - kappa (e^u - 1) + v(t).
/// Emits a stiffness warning flag when kappa e^{u_max} dt / tau > 0.5.
inline Waveform circuit_mean_field(const CircuitParams& p, double T, double dt,
                                   bool* stiff_warning = nullptr) {
  p.validate();
  double u = 0.0, umax = 0.0;
  Waveform wf;
  const std::size_t steps = std::size_t(std::llround(T / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    double t = k * dt;
    auto rhs = [&](double tt, double y) {
      return (-p.mu * y - p.kappa * std::expm1(y) + p.drive(tt)) / p.tau;
    };
    double k1 = rhs(t, u);
    double k2 = rhs(t + 0.5 * dt, u + 0.5 * dt * k1);
    double k3 = rhs(t + 0.5 * dt, u + 0.5 * dt * k2);
    double k4 = rhs(t + dt, u + dt * k3);
    u += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    umax = std::max(umax, std::abs(u));
    wf.times.push_back((k + 1) * dt);
    wf.values.push_back(u);
  }
  if (stiff_warning) *stiff_warning = p.kappa * std::exp(umax) * dt / p.tau > 0.5;
  return wf;
}

// ---------------------------------------------------------------------------
// Kuramoto model

struct KuramotoParams {
  std::vector<double> Omega;  // N natural frequencies
  double psi = 0.0;           // cartesian coupling; action-angle eta = psi/2
  std::vector<double> x0, p0;

  int N() const { return int(Omega.size()); }
  void validate() const {
    if (Omega.size() < 2) throw std::invalid_argument("kuramoto: need N >= 2");
    if (x0.size() != Omega.size() || p0.size() != Omega.size())
      throw std::invalid_argument("kuramoto: initial state size mismatch");
  }
};

enum class KuramotoForm { cartesian, action_angle };

struct KuramotoTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> x, p;  // cartesian view at each sample
  std::vector<double> energy;
};

inline double kuramoto_hamiltonian(const KuramotoParams& q, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& p) {
  const int N = q.N();
  double H = 0.0;
  for (int j = 0; j < N; ++j) H += 0.5 * q.Omega[j] * (x(j) * x(j) + p(j) * p(j));
  for (int l = 0; l < N; ++l)
    for (int m = 0; m < N; ++m) {
      double Il = 0.5 * (x(l) * x(l) + p(l) * p(l));
      double Im = 0.5 * (x(m) * x(m) + p(m) * p(m));
      H += 0.25 * q.psi * (x(l) * p(m) - x(m) * p(l)) * (Im - Il);
    }
  return H;
}

/// Canonical equations of the cartesian form:
///   dx_j/dt =  Omega_j p_j + (psi/2) sum_k [ x_k (I_j - I_k) + p_j (x_k p_j - x_j p_k) ]
///   dp_j/dt = -Omega_j x_j - (psi/2) sum_k [ p_k (I_k - I_j) + x_j (x_k p_j - x_j p_k) ].
inline KuramotoTrajectory kuramoto_integrate(const KuramotoParams& q, KuramotoForm form,
                                             double T, double dt) {
  q.validate();
  const int N = q.N();
  KuramotoTrajectory tr;
  const std::size_t steps = std::size_t(std::llround(T / dt));

  if (form == KuramotoForm::cartesian) {
    Eigen::VectorXd y(2 * N);
    for (int j = 0; j < N; ++j) {
      y(j) = q.x0[j];
      y(N + j) = q.p0[j];
    }
    auto rhs = [&](double, const Eigen::VectorXd& s) -> Eigen::VectorXd {
      Eigen::VectorXd d(2 * N);
      for (int j = 0; j < N; ++j) {
        double xj = s(j), pj = s(N + j);
        double Ij = 0.5 * (xj * xj + pj * pj);
        double dx = q.Omega[j] * pj, dp = -q.Omega[j] * xj;
        for (int k = 0; k < N; ++k) {
          double xk = s(k), pk = s(N + k);
          double Ik = 0.5 * (xk * xk + pk * pk);
          double cross = xk * pj - xj * pk;
          dx += 0.5 * q.psi * (xk * (Ij - Ik) + pj * cross);
          dp -= 0.5 * q.psi * (pk * (Ik - Ij) + xj * cross);
        }
        d(j) = dx;
        d(N + j) = dp;
      }
      return d;
    };
    for (std::size_t k = 0; k <= steps; ++k) {
      Eigen::VectorXd x = y.head(N), p = y.tail(N);
      tr.times.push_back(k * dt);
      tr.x.push_back(x);
      tr.p.push_back(p);
      tr.energy.push_back(kuramoto_hamiltonian(q, x, p));
      if (k < steps) detail::rk4_step(y, k * dt, dt, rhs);
    }
    return tr;
  }

  // action-angle form, eta = psi/2
  const double eta = 0.5 * q.psi;
  Eigen::VectorXd y(2 * N);
  for (int j = 0; j < N; ++j) {
    double Ij = 0.5 * (q.x0[j] * q.x0[j] + q.p0[j] * q.p0[j]);
    if (Ij <= 0.0)
      throw std::domain_error("kuramoto action-angle: coordinate singularity I_j = 0");
    y(j) = Ij;
    y(N + j) = std::atan2(q.x0[j], q.p0[j]);
  }
  auto rhs = [&](double, const Eigen::VectorXd& s) -> Eigen::VectorXd {
    Eigen::VectorXd d(2 * N);
    for (int j = 0; j < N; ++j) {
      double Ij = s(j);
      if (Ij <= 0.0)
        throw std::domain_error("kuramoto action-angle: coordinate singularity I_j = 0");
      double phj = s(N + j);
      double dI = 0.0, dph = q.Omega[j];
      for (int k = 0; k < N; ++k) {
        if (k == j) continue;
        double Ik = s(k), phk = s(N + k);
        double sdiff = std::sin(phk - phj), cdiff = std::cos(phk - phj);
        dph -= eta * sdiff * (std::sqrt(Ik / Ij) * (Ik - Ij) - 2.0 * std::sqrt(Ij * Ik));
        dI -= 2.0 * eta * std::sqrt(Ij * Ik) * (Ik - Ij) * cdiff;
      }
      d(j) = dI;
      d(N + j) = dph;
    }
    return d;
  };
  for (std::size_t k = 0; k <= steps; ++k) {
    Eigen::VectorXd x(N), p(N);
    for (int j = 0; j < N; ++j) {
      double r = std::sqrt(2.0 * std::max(y(j), 0.0));
      x(j) = r * std::sin(y(N + j));
      p(j) = r * std::cos(y(N + j));
    }
    tr.times.push_back(k * dt);
    tr.x.push_back(x);
    tr.p.push_back(p);
    tr.energy.push_back(kuramoto_hamiltonian(q, x, p));
    if (k < steps) detail::rk4_step(y, k * dt, dt, rhs);
  }
  return tr;
}

}  // namespace hoops
