#pragma once

// Truncated Fock-space matrix oracle for the symbolic algebra.  Basis states
// enumerate occupations lexicographically, first mode slowest.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hoops/algebra.hpp"

namespace hoops {

/// Per-mode truncation: dimension of the local Fock ladder (occupations
/// 0 .. cutoff-1).
using CutoffMap = std::vector<int>;

namespace detail {

inline std::size_t fock_dim(const CutoffMap& cut) {
  std::size_t d = 1;
  for (int c : cut) d *= std::size_t(c);
  return d;
}

inline void unrank(std::size_t idx, const CutoffMap& cut, std::vector<int>& occ) {
  occ.assign(cut.size(), 0);
  for (std::size_t m = cut.size(); m-- > 0;) {
    occ[m] = int(idx % std::size_t(cut[m]));
    idx /= std::size_t(cut[m]);
  }
}

inline std::size_t rank(const std::vector<int>& occ, const CutoffMap& cut) {
  std::size_t idx = 0;
  for (std::size_t m = 0; m < cut.size(); ++m) idx = idx * std::size_t(cut[m]) + std::size_t(occ[m]);
  return idx;
}

// <n - q + p | a†^p a^q | n> on one mode
inline double ladder_element(int n, int p, int q) {
  if (n < q) return 0.0;
  double amp = 1.0;
  for (int i = 0; i < q; ++i) amp *= std::sqrt(double(n - i));
  for (int i = 1; i <= p; ++i) amp *= std::sqrt(double(n - q + i));
  return amp;
}

}  // namespace detail

/// Matrix of the polynomial on the truncated tensor-product Fock space.
/// Requires cutoffs at least degree + 2 on every mode.
inline Eigen::MatrixXcd fock_matrix(const OperatorPolynomial& p, const CutoffMap& cutoffs) {
  const auto& ctx = p.context();
  if (cutoffs.size() != ctx.size())
    throw std::invalid_argument("fock_matrix: cutoff count does not match mode count");
  std::vector<int> mode_deg(ctx.size(), 0);
  for (const auto& [sig, c] : p.terms())
    for (std::size_t m = 0; m < sig.size(); ++m)
      mode_deg[m] = std::max(mode_deg[m], sig[m].c + sig[m].a);
  for (std::size_t m = 0; m < cutoffs.size(); ++m)
    if (cutoffs[m] < mode_deg[m] + 2)
      throw std::invalid_argument("fock_matrix: cutoff too small for operator degree " +
                                  std::to_string(mode_deg[m]));

  std::size_t dim = detail::fock_dim(cutoffs);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<int> occ, occ2;
  for (std::size_t col = 0; col < dim; ++col) {
    detail::unrank(col, cutoffs, occ);
    for (const auto& [sig, coeff] : p.terms()) {
      double amp = 1.0;
      bool ok = true;
      occ2 = occ;
      for (std::size_t m = 0; m < ctx.size() && ok; ++m) {
        int n = occ[m];
        if (n < sig[m].a) { ok = false; break; }
        int n2 = n - sig[m].a + sig[m].c;
        if (n2 >= cutoffs[m]) { ok = false; break; }
        amp *= detail::ladder_element(n, sig[m].c, sig[m].a);
        occ2[m] = n2;
      }
      if (!ok) continue;
      M(detail::rank(occ2, cutoffs), col) += coeff * amp;
    }
  }
  return M;
}

/// Indices of states with total occupation <= limit; the truncation-safe
/// interior subspace is limit = min(cutoff) - max operator degree.
inline std::vector<std::size_t> interior_indices(const CutoffMap& cutoffs, int occupation_limit) {
  std::vector<std::size_t> keep;
  std::vector<int> occ;
  std::size_t dim = detail::fock_dim(cutoffs);
  for (std::size_t i = 0; i < dim; ++i) {
    detail::unrank(i, cutoffs, occ);
    int tot = 0;
    for (int o : occ) tot += o;
    if (tot <= occupation_limit) keep.push_back(i);
  }
  return keep;
}

/// Max abs deviation of A-B restricted to interior rows and columns.
inline double interior_max_diff(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                const std::vector<std::size_t>& interior) {
  double m = 0;
  for (auto i : interior)
    for (auto j : interior) m = std::max(m, std::abs(A(i, j) - B(i, j)));
  return m;
}

/// Checks a symbolic operator identity lhs == rhs through the Fock oracle,
/// comparing matrix representations on the interior subspace.
inline double fock_identity_error(const OperatorPolynomial& lhs, const OperatorPolynomial& rhs,
                                  int cutoff) {
  CutoffMap cut(lhs.context().size(), cutoff);
  auto A = fock_matrix(lhs, cut);
  auto B = fock_matrix(rhs, cut);
  int deg = std::max(lhs.degree(), rhs.degree());
  auto keep = interior_indices(cut, cutoff - 1 - deg);
  return interior_max_diff(A, B, keep);
}

/// Fock check of commutator(a, b) == expected: the left side is evaluated as
/// a raw matrix commutator, independent of the symbolic normal-ordering path.
inline double fock_commutator_error(const OperatorPolynomial& a, const OperatorPolynomial& b,
                                    const OperatorPolynomial& expected, int cutoff) {
  CutoffMap cut(a.context().size(), cutoff);
  auto A = fock_matrix(a, cut);
  auto B = fock_matrix(b, cut);
  auto E = fock_matrix(expected, cut);
  Eigen::MatrixXcd C = A * B - B * A;
  int deg = a.degree() + b.degree();
  auto keep = interior_indices(cut, cutoff - 1 - deg);
  return interior_max_diff(C, E, keep);
}

}  // namespace hoops
