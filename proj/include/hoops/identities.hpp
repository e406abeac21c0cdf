#pragma once

// Scalar identities reused from the derivation chapters: the pi summation
// identity and the Bogoliubov squeeze ratio.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace hoops {

/// Residual of the partial sum  sum_{j=1..J, j!=k} 4 k^2 j^2 / (j^2-k^2)^2
/// against its closed value k^2 pi^2 / 3 + 1/4.  Tail decays as O(1/J).
inline double pi_sum_residual(int k, long long terms) {
  if (k < 1) throw std::invalid_argument("pi_sum_residual: k must be positive");
  if (terms <= k) throw std::invalid_argument("pi_sum_residual: need terms > k");
  const double k2 = double(k) * double(k);
  double sum = 0.0, comp = 0.0;  // Kahan compensation
  for (long long j = 1; j <= terms; ++j) {
    if (j == k) continue;
    double j2 = double(j) * double(j);
    double den = j2 - k2;
    double term = 4.0 * k2 * j2 / (den * den);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double target = k2 * M_PI * M_PI / 3.0 + 0.25;
  return std::abs(sum - target);
}

/// Squeeze ratio of the linearized quadratic interaction, closed form
/// rho = ln(omega / (sqrt(R) Omega)) - i phi / 2.
inline std::complex<double> squeeze_ratio(double omega, double Omega, double R, double phi) {
  if (omega <= 0 || Omega <= 0 || R <= 0)
    throw std::invalid_argument("squeeze_ratio: frequencies and R must be positive");
  return {std::log(omega / (std::sqrt(R) * Omega)), -0.5 * phi};
}

/// Same ratio from the Bogoliubov atanh form with G- = R (Omega/omega)^2 G+;
/// the two routes must agree for all valid arguments.
inline std::complex<double> squeeze_ratio_atanh(double omega, double Omega, double R, double phi) {
  std::complex<double> z = R * (Omega / omega) * (Omega / omega) *
                           std::exp(std::complex<double>(0.0, phi));
  return std::atanh((1.0 - z) / (1.0 + z));
}

}  // namespace hoops
