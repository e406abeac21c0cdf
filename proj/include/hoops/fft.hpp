#pragma once

// Minimal complex FFT: iterative radix-2 for powers of two, Bluestein
// otherwise.  Forward kernel e^{-i 2 pi k n / N}.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hoops {

namespace detail {

inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

}  // namespace detail

inline void fft(std::vector<std::complex<double>>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (n == 0) return;
  if (detail::is_pow2(n)) {
    detail::fft_radix2(a, inverse);
    return;
  }
  // Bluestein: express as a convolution of length >= 2n-1
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> u(m, 0.0), v(m, 0.0), w(n);
  double sgn = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double ang = sgn * M_PI * double((k * k) % (2 * n)) / double(n);
    w[k] = {std::cos(ang), std::sin(ang)};
    u[k] = a[k] * w[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = std::conj(w[k]);
    if (k) v[m - k] = std::conj(w[k]);
  }
  detail::fft_radix2(u, false);
  detail::fft_radix2(v, false);
  for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
  detail::fft_radix2(u, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * w[k];
  if (inverse)
    for (auto& x : a) x /= double(n);
}

/// Linear convolution of two sampled sequences through zero-padded FFT;
/// output length a.size() + b.size() - 1.
inline std::vector<std::complex<double>> linear_convolution(
    const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
  std::size_t out_n = a.size() + b.size() - 1, m = 1;
  while (m < out_n) m <<= 1;
  std::vector<std::complex<double>> fa(m, 0.0), fb(m, 0.0);
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  detail::fft_radix2(fa, false);
  detail::fft_radix2(fb, false);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  detail::fft_radix2(fa, true);
  fa.resize(out_n);
  return fa;
}

/// 3-point parabolic interpolation of a peak position on log power; bin k
/// must be a local maximum.  Returns the fractional bin offset in [-0.5, 0.5].
inline double parabolic_peak_offset(double ym, double y0, double yp) {
  double lm = std::log(std::max(ym, 1e-300));
  double l0 = std::log(std::max(y0, 1e-300));
  double lp = std::log(std::max(yp, 1e-300));
  double den = lm - 2.0 * l0 + lp;
  if (den == 0.0) return 0.0;
  double off = 0.5 * (lm - lp) / den;
  return std::clamp(off, -0.5, 0.5);
}

}  // namespace hoops
