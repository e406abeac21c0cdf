#pragma once

// The universal integrable object: a linear(ized) Langevin system
//   dA/dt = M A - G A_in + drive
// with named basis operators and named noise channels.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hoops/algebra.hpp"

namespace hoops {

enum class Frame { rotating, absolute, normalized };

/// One elementary input channel with its (possibly asymmetric) flat spectral
/// density on positive and negative frequencies.  `silent` names the
/// frequency-domain multiplicative factor when the physical injection is a
/// multiplicative-noise term; the spectra module resolves it.
struct NoiseChannel {
  std::string label;
  double S_plus = 0.5;
  double S_minus = 0.5;
  std::optional<std::string> silent;

  double symmetrized() const { return 0.5 * (S_plus + S_minus); }
  double density(double w) const { return w >= 0.0 ? S_plus : S_minus; }
};

/// Mean values baked into a linearized coefficient matrix.
struct MeanRecord {
  double n = 0.0;     // photon number
  double m = 0.0;     // coherent phonon number
  cplx b = 0.0;       // mechanical amplitude
  cplx d = 0.0;       // squared-amplitude mean
  double phase = 0.0; // drive phase
};

struct LangevinSystem {
  std::vector<std::string> basis_labels;
  Eigen::MatrixXcd M;          // d x d coefficient matrix
  Eigen::MatrixXcd noise_map;  // d x k injection amplitudes
  std::vector<NoiseChannel> channels;
  Eigen::VectorXcd drive;      // d-vector
  Eigen::VectorXd decay_rates; // per-basis-op decay, for port scattering
  Frame frame = Frame::rotating;
  double time_scale = 1.0;     // physical time = time_scale * system time
  MeanRecord means_used;

  Eigen::Index dim() const { return M.rows(); }

  Eigen::VectorXcd eigenvalues() const {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    return es.eigenvalues();
  }

  double max_real_eigenvalue() const {
    auto ev = eigenvalues();
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) m = std::max(m, ev(i).real());
    return m;
  }

  bool stable() const { return max_real_eigenvalue() < 0.0; }

  void validate() const {
    if (M.rows() != M.cols()) throw std::logic_error("LangevinSystem: M not square");
    if (Eigen::Index(basis_labels.size()) != M.rows())
      throw std::logic_error("LangevinSystem: basis label count mismatch");
    if (noise_map.size() > 0 && noise_map.rows() != M.rows())
      throw std::logic_error("LangevinSystem: noise map row mismatch");
    if (Eigen::Index(channels.size()) != noise_map.cols())
      throw std::logic_error("LangevinSystem: channel count mismatch");
    if (!M.allFinite()) throw std::logic_error("LangevinSystem: non-finite coefficients");
  }
};

// ---------------------------------------------------------------------------
// Automatic generation from a Hamiltonian

/// Decay channel attached to one system operator x with rate gamma:
/// contributes -[z,x†](gamma/2 x) + (gamma/2 x†)[z,x] to every equation.
struct DecayChannelSpec {
  OperatorPolynomial op;
  double rate = 0.0;
};

struct GeneratedSystem {
  Eigen::MatrixXcd M;
  Eigen::VectorXcd drive;      // identity components of the reduced RHS
  double max_fit_residual = 0; // worst span-fit residual over rows
};

/// Builds the coefficient matrix row by row: for every basis operator z the
/// right-hand side -i[z,H] + decay terms is mean-field reduced onto
/// span(basis + identity) and projected.  hbar = 1.
inline GeneratedSystem generate_langevin(const OperatorPolynomial& hamiltonian,
                                         const std::vector<OperatorPolynomial>& basis,
                                         const std::vector<DecayChannelSpec>& decays,
                                         const MeanMap& means) {
  const std::size_t d = basis.size();
  GeneratedSystem out;
  out.M.resize(d, d);
  out.drive.resize(d);

  std::vector<OperatorPolynomial> span = basis;
  span.push_back(OperatorPolynomial::identity(hamiltonian.context()));

  for (std::size_t r = 0; r < d; ++r) {
    const auto& z = basis[r];
    OperatorPolynomial rhs = cplx(0, -1) * commutator(z, hamiltonian);
    for (const auto& dec : decays) {
      auto xd = dec.op.dagger();
      rhs -= (0.5 * dec.rate) * multiply(commutator(z, xd), dec.op);
      rhs += (0.5 * dec.rate) * multiply(xd, commutator(z, dec.op));
    }
    auto reduced = mean_field_reduce(rhs, means, span, /*drop_unreachable=*/true);
    auto fit = span_fit(reduced, span);
    out.max_fit_residual = std::max(out.max_fit_residual, fit.residual);
    for (std::size_t c = 0; c < d; ++c) out.M(r, c) = fit.coords(c);
    out.drive(r) = fit.coords(d);
  }
  return out;
}

}  // namespace hoops
