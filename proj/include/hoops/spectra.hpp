#pragma once

// Scattering matrices and output noise spectral densities.
//
// Unified frequency-domain convention: operator transform kernel matched to
// resolvents (M - i w I)^{-1}; port scattering S(w) = I + G^T (M - i w I)^{-1} G,
// which is all-pass for a lossless single port.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoops/fft.hpp"
#include "hoops/langevin.hpp"
#include "hoops/models.hpp"

namespace hoops {

struct FrequencyGrid {
  double start = -1.0, stop = 1.0;
  int points = 201;
  bool log_scale = false;

  std::vector<double> build() const {
    if (points < 2) throw std::invalid_argument("grid needs >= 2 points");
    std::vector<double> w(points);
    if (log_scale) {
      if (start <= 0 || stop <= 0) throw std::invalid_argument("log grid needs positive bounds");
      double l0 = std::log(start), l1 = std::log(stop);
      for (int i = 0; i < points; ++i)
        w[i] = std::exp(l0 + (l1 - l0) * i / double(points - 1));
    } else {
      for (int i = 0; i < points; ++i)
        w[i] = start + (stop - start) * i / double(points - 1);
    }
    return w;
  }
};

struct SpectrumSeries {
  std::vector<double> freqs;
  std::vector<double> values;
  std::vector<cplx> cvalues;  // optional complex payload (transfer functions)
  std::string channel;
  Frame frame = Frame::rotating;

  void check_density() const {
    for (std::size_t i = 1; i < freqs.size(); ++i)
      if (freqs[i] <= freqs[i - 1]) throw std::logic_error("spectrum grid not increasing");
    for (double v : values)
      if (v < -1e-12) throw std::logic_error("negative spectral density");
  }
};

/// Resolvent (M - i w I)^{-1}; throws naming the frequency when singular.
inline Eigen::MatrixXcd resolvent(const LangevinSystem& sys, double w) {
  Eigen::MatrixXcd A = sys.M - I * w * Eigen::MatrixXcd::Identity(sys.dim(), sys.dim());
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  if (!lu.isInvertible())
    throw std::runtime_error("singular resolvent at w = " + std::to_string(w));
  return lu.inverse();
}

/// Port scattering matrix on the system's noise channels,
/// S(w) = I + G^T (M - i w I)^{-1} G.
inline Eigen::MatrixXcd scattering_matrix(const LangevinSystem& sys, double w) {
  const auto& G = sys.noise_map;
  Eigen::MatrixXcd R = resolvent(sys, w);
  return Eigen::MatrixXcd::Identity(G.cols(), G.cols()) + G.transpose() * R * G;
}

/// Scattering on the per-operator decay ports, G = diag(sqrt(decay_rates)).
/// This is the matrix entering the multiplicative-noise assembly.
inline Eigen::MatrixXcd scattering_matrix_ports(const LangevinSystem& sys, double w) {
  Eigen::MatrixXcd G = sys.decay_rates.cwiseSqrt().cast<cplx>().asDiagonal();
  Eigen::MatrixXcd R = resolvent(sys, w);
  return Eigen::MatrixXcd::Identity(sys.dim(), sys.dim()) + G.transpose() * R * G;
}

/// Closed-form first-row elements of the reduced 3x3 optomechanical
/// scattering matrix on the decay ports (kappa, gamma, gamma):
///   D(u) = (u - i k/2)[(u - i g/2)^2 - O^2] - 2 g0^2 [mt (u - i g/2) - nt O]
/// with u = w - Delta, nt = nbar + 1/2, mt = mbar + 1/2.
struct Row3Closed {
  cplx S11, S12, S13;
};

inline Row3Closed scattering_row3_closed(const OptomechParams& p, double nbar, double mbar,
                                         double w) {
  const double g0 = p.g0, k = p.kappa, gam = p.gamma_total(), O = p.Omega;
  const double nt = nbar + 0.5, mt = mbar + 0.5;
  const cplx u = w - p.Delta;
  const cplx ug = u - 0.5 * I * gam;
  const cplx D = (u - 0.5 * I * k) * (ug * ug - O * O) - 2.0 * g0 * g0 * (mt * ug - nt * O);
  Row3Closed r;
  r.S11 = 1.0 + I * k * (ug * ug - O * O) / D;
  r.S12 = I * g0 * std::sqrt(k * gam) * (u - O - 0.5 * I * gam) / D;
  r.S13 = I * g0 * std::sqrt(k * gam) * (u + O - 0.5 * I * gam) / D;
  return r;
}

/// Output spectral density on the monitored channel row:
/// S(w) = sum_j |S_row,j(w)|^2 S_j,in(w).
inline SpectrumSeries output_spectrum(const LangevinSystem& sys, const std::vector<double>& grid,
                                      int row = 0) {
  SpectrumSeries out;
  out.freqs = grid;
  out.values.resize(grid.size());
  out.channel = row < int(sys.channels.size()) ? sys.channels[row].label : "out";
  out.frame = sys.frame;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto S = scattering_matrix(sys, grid[i]);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      acc += std::norm(S(row, j)) * sys.channels[j].density(grid[i]);
    out.values[i] = std::max(acc, 0.0);
  }
  out.check_density();
  return out;
}

// ---------------------------------------------------------------------------
// Multiplicative noise: silent functions and convolution assembly

/// Frequency-domain silent factor: an optional carrier delta at w = 0 plus a
/// smooth density.  (Y * s)(w) = delta_weight Y(w) + (1/2pi) int Y(w') s(w-w') dw'.
struct SilentFunction {
  std::string label;
  cplx delta_weight = 0.0;
  std::function<cplx(double)> smooth;  // may be empty

  cplx eval(double w) const { return smooth ? smooth(w) : cplx(0.0); }
};

/// Closed-form silent functions of the driven optomechanical cavity.
struct OptomechSilents {
  SilentFunction bbar, abar, ab, ab_conj;
};

inline OptomechSilents optomech_silents(const OptomechParams& p, double nbar, double mbar) {
  const double g0 = p.g0, k = p.kappa, G = p.Gamma, gam = p.gamma_total(), O = p.Omega;
  const double D = p.Delta;
  const double nt = nbar + 0.5, mt = mbar + 0.5;
  const cplx alpha = std::sqrt(nbar) *
                     cplx(-0.5 * k, D + 2.0 * g0 * g0 * O * nbar / (O * O + 0.25 * G * G));
  auto denom = [=](double w) -> cplx {
    cplx u = w - D;
    cplx ug = u - 0.5 * I * gam;
    return 2.0 * g0 * g0 * ((D - w + 0.5 * I * gam) * mt + O * nt) +
           (u - 0.5 * I * k) * (ug * ug - O * O);
  };
  OptomechSilents s;
  s.bbar.label = "bbar";
  s.bbar.smooth = [=](double w) -> cplx { return alpha / (I * (w + O) + 0.5 * G); };
  s.abar.label = "abar";
  s.abar.smooth = [=](double w) -> cplx {
    cplx num = -alpha * alpha * g0 * (w - D - O - 0.5 * I * gam);
    return num / ((w + O - 0.5 * I * G) * denom(w));
  };
  s.ab.label = "ab";
  s.ab.smooth = [=](double w) -> cplx {
    cplx num = alpha * alpha *
               (g0 * g0 * (mbar - nbar) -
                (w - D - 0.5 * I * k) * (w - D - O - 0.5 * I * gam));
    return num / ((w + O - 0.5 * I * G) * denom(w));
  };
  s.ab_conj.label = "ab_conj";
  s.ab_conj.smooth = [=](double w) -> cplx {
    cplx num = -std::norm(alpha) *
               (g0 * g0 * (mbar + nbar + 1.0) -
                (w - D - 0.5 * I * k) * (w - D + O - 0.5 * I * gam));
    return num / ((w + O + 0.5 * I * G) * denom(w));
  };
  return s;
}

namespace detail {

/// (Y * s)(w) on a uniform grid, with the silent factor evaluated analytically
/// on a 4x zero-padded span.  Returns values on the original grid.
inline std::vector<cplx> convolve_silent(const std::vector<double>& grid,
                                         const std::vector<cplx>& Y, const SilentFunction& s,
                                         bool direct_quadrature = false) {
  const std::size_t n = grid.size();
  if (n < 2) throw std::invalid_argument("convolution grid too small");
  const double dw = grid[1] - grid[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(grid[i] - grid[i - 1] - dw) > 1e-9 * dw)
      throw std::invalid_argument("convolution requires a uniform grid");

  // pad Y with zeros to 4x span; silent factor sampled analytically on the
  // difference grid it needs
  const std::size_t pad = n;  // zeros on each side: total span 3n ~ about 4x
  const std::size_t N = n + 2 * pad;
  std::vector<cplx> Yp(N, 0.0);
  for (std::size_t i = 0; i < n; ++i) Yp[i + pad] = Y[i];

  // kernel s on offsets (-(N-1) .. N-1) * dw
  std::vector<cplx> ker(2 * N - 1);
  for (std::size_t k = 0; k < ker.size(); ++k) {
    double off = (double(k) - double(N - 1)) * dw;
    ker[k] = s.eval(off) * dw / (2.0 * M_PI);
  }

  std::vector<cplx> out(n, 0.0);
  if (direct_quadrature) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gi = i + pad;
      cplx acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += Yp[j] * ker[gi - j + (N - 1)];
      out[i] = acc + s.delta_weight * Y[i];
    }
    return out;
  }
  auto conv = linear_convolution(Yp, ker);
  // conv index for output grid point i: (i + pad) + (N - 1)
  for (std::size_t i = 0; i < n; ++i) out[i] = conv[i + pad + (N - 1)] + s.delta_weight * Y[i];
  return out;
}

}  // namespace detail

/// Symmetrized output density with multiplicative noise resolved through the
/// silent factors:
///   S(w) = |Y11|^2 S_AA + (1/gamma^2)|(Y12+Y13) * abar|^2 S_BB
///        + (1/theta^2)|Y14 * ab + Y15 * ab_conj|^2 S_BB.
/// The last term requires the 5-dim system and is skipped for the 3-dim one.
inline SpectrumSeries multiplicative_spectrum(const LangevinSystem& sys,
                                              const OptomechSilents& silents,
                                              const std::vector<double>& grid, double S_AA,
                                              double S_BB, double gamma, double theta) {
  const bool five = sys.dim() >= 5;
  std::vector<cplx> Y11(grid.size()), Y23(grid.size()), Y14(grid.size()), Y15(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto Y = scattering_matrix_ports(sys, grid[i]);
    Y11[i] = Y(0, 0);
    Y23[i] = Y(0, 1) + Y(0, 2);
    if (five) {
      Y14[i] = Y(0, 3);
      Y15[i] = Y(0, 4);
    }
  }
  auto c1 = detail::convolve_silent(grid, Y23, silents.abar);
  std::vector<cplx> c2, c3;
  if (five) {
    c2 = detail::convolve_silent(grid, Y14, silents.ab);
    c3 = detail::convolve_silent(grid, Y15, silents.ab_conj);
  }
  SpectrumSeries out;
  out.freqs = grid;
  out.values.resize(grid.size());
  out.channel = "S_out";
  out.frame = sys.frame;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = std::norm(Y11[i]) * S_AA + std::norm(c1[i]) * S_BB / (gamma * gamma);
    if (five) v += std::norm(c2[i] + c3[i]) * S_BB / (theta * theta);
    out.values[i] = v;
  }
  out.check_density();
  return out;
}

// ---------------------------------------------------------------------------
// First-order spectrum recovery

enum class RecoveryMode { gaussian_peaks, fourier_sqrt };

/// Gaussian-peak recovery: fits well-isolated peaks s_j exp[-(w-w_j)^2/Dw_j^2]
/// and emits  S_AA(w) = 2 pi sqrt(pi) sum_j (s_j w_j^2 / Dw_j)
///                      exp[-(w - w_j/2)^2 / (2 Dw_j^2)].
inline SpectrumSeries recover_gaussian_peaks(const SpectrumSeries& in) {
  struct Peak {
    double s, w0, dw;
  };
  std::vector<Peak> peaks;
  const auto& f = in.freqs;
  const auto& v = in.values;
  double vmax = *std::max_element(v.begin(), v.end());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > 1e-6 * vmax) {
      if (v[i - 1] <= 0 || v[i + 1] <= 0) continue;
      // log-parabola through the three samples, bin offset x
      double lm = std::log(v[i - 1]), l0 = std::log(v[i]), lp = std::log(v[i + 1]);
      double h = f[i + 1] - f[i];
      double b = 0.5 * (lp - lm), c = 0.5 * (lm - 2 * l0 + lp);
      if (c >= 0) continue;
      double x0 = -b / (2.0 * c);
      double w0 = f[i] + x0 * h;
      double dw = h * std::sqrt(-1.0 / c);
      double s = std::exp(l0 - b * b / (4.0 * c));
      peaks.push_back({s, w0, dw});
    }
  }
  if (peaks.empty()) throw std::runtime_error("gaussian recovery: no fitted peaks");
  SpectrumSeries out;
  out.freqs = in.freqs;
  out.values.assign(in.freqs.size(), 0.0);
  out.channel = "S_AA(recovered)";
  out.frame = in.frame;
  for (std::size_t i = 0; i < out.freqs.size(); ++i) {
    double w = out.freqs[i], acc = 0.0;
    for (const auto& pk : peaks) {
      double arg = (w - 0.5 * pk.w0);
      acc += 2.0 * M_PI * std::sqrt(M_PI) * pk.s * pk.w0 * pk.w0 / pk.dw *
             std::exp(-arg * arg / (2.0 * pk.dw * pk.dw));
    }
    out.values[i] = acc;
  }
  return out;
}

/// Fourier square-root recovery:
///   S_BB = 1/2 + F{ sqrt( (1/2) F^{-1}{ S_DD - 1/2 } ) }.
/// Negative lobes smaller than clamp_tol (relative to the largest positive
/// lobe) are clamped; larger negatives abort with the worst offender.
inline SpectrumSeries recover_fourier_sqrt(const SpectrumSeries& in, double clamp_tol = 1e-9) {
  const std::size_t n = in.values.size();
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = in.values[i] - 0.5;
  fft(buf, true);  // to "time" domain
  double top = 0.0, worst = 0.0;
  for (auto& z : buf) {
    top = std::max(top, z.real());
    worst = std::min(worst, z.real());
  }
  if (worst < -clamp_tol * std::max(top, 1e-300))
    throw std::runtime_error("fourier-sqrt recovery: negative argument " + std::to_string(worst));
  for (auto& z : buf) z = std::sqrt(0.5 * std::max(z.real(), 0.0));
  fft(buf, false);
  SpectrumSeries out;
  out.freqs = in.freqs;
  out.values.resize(n);
  out.channel = "S_BB(recovered)";
  out.frame = in.frame;
  for (std::size_t i = 0; i < n; ++i) out.values[i] = 0.5 + buf[i].real();
  return out;
}

inline SpectrumSeries recover_first_order(const SpectrumSeries& in, RecoveryMode mode,
                                          double clamp_tol = 1e-9) {
  return mode == RecoveryMode::gaussian_peaks ? recover_gaussian_peaks(in)
                                              : recover_fourier_sqrt(in, clamp_tol);
}

// ---------------------------------------------------------------------------
// Squared-noise spectra and g2(0)

/// S_{F2F2}(w) = chi/(pi sqrt(pi) omega) exp[-(w-2 omega)^2/(4 chi^2 omega^2)];
/// integrates to 2 chi^2 / pi.
inline SpectrumSeries squared_noise_spectrum(double chi, double omega,
                                             const std::vector<double>& grid) {
  if (chi <= 0) throw std::invalid_argument("squared_noise_spectrum: chi must be positive");
  SpectrumSeries out;
  out.freqs = grid;
  out.values.resize(grid.size());
  out.channel = "S_F2F2";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double arg = grid[i] - 2.0 * omega;
    out.values[i] = chi / (M_PI * std::sqrt(M_PI) * omega) *
                    std::exp(-arg * arg / (4.0 * chi * chi * omega * omega));
  }
  return out;
}

/// g2(0) from the correlator values at zero delay:
///   g2(0) = (2/nbar^2) Psi0 (Psi0 + Ups0) - (4 nbar + 2)/nbar^2.
inline double g2_zero(double Psi0, double Ups0, double nbar) {
  if (nbar <= 0) throw std::invalid_argument("g2_zero: undefined for nbar = 0");
  return 2.0 / (nbar * nbar) * Psi0 * (Psi0 + Ups0) - (4.0 * nbar + 2.0) / (nbar * nbar);
}

/// Integral form: g2(0) = 4 int S_CC dw / nbar^2 - (4 nbar + 2)/nbar^2,
/// trapezoid quadrature on the series grid.
inline double g2_zero(const SpectrumSeries& S_CC, double nbar) {
  if (nbar <= 0) throw std::invalid_argument("g2_zero: undefined for nbar = 0");
  double integral = 0.0;
  for (std::size_t i = 1; i < S_CC.freqs.size(); ++i)
    integral += 0.5 * (S_CC.values[i] + S_CC.values[i - 1]) *
                (S_CC.freqs[i] - S_CC.freqs[i - 1]);
  return 4.0 * integral / (nbar * nbar) - (4.0 * nbar + 2.0) / (nbar * nbar);
}

}  // namespace hoops
