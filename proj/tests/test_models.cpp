#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hoops/fock.hpp"
#include "hoops/models.hpp"

using namespace hoops;
using Catch::Approx;

namespace {

OptomechParams sample_params() {
  OptomechParams p;
  p.Omega = 1.0;
  p.kappa = 0.05;
  p.Gamma = 1e-4;
  p.g0 = 1e-3;
  p.Delta = 0.13;
  p.alpha = 3.0;
  p.m_th = 0.2;
  return p;
}

/// row(x†) = conj(row(x)) under the index swap given by `partner`.
void check_conjugate_rows(const Eigen::MatrixXcd& M, const std::vector<int>& partner) {
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c)
      REQUIRE(std::abs(M(partner[r], partner[c]) - std::conj(M(r, c))) < 1e-13);
}

}  // namespace

TEST_CASE("linearized 4x4 optomechanics") {
  auto p = sample_params();

  SECTION("g0 = 0 decouples optics from mechanics") {
    auto q = p;
    q.g0 = 0.0;
    auto s = build_linearized_optomech(q, 1e4);
    REQUIRE(s.M.block(0, 2, 2, 2).norm() == 0.0);
    REQUIRE(s.M.block(2, 0, 2, 2).norm() == 0.0);
  }
  SECTION("nbar = 0 gives g = 0 and f = 0") {
    auto s = build_linearized_optomech(p, 0.0);
    REQUIRE(s.M(0, 2) == cplx(0.0));
    REQUIRE(s.M(0, 0) == cplx(-0.5 * p.kappa, p.Delta));
  }
  SECTION("eigenvalues near the decoupled set to O(g)") {
    double nbar = 100.0;
    auto s = build_linearized_optomech(p, nbar);
    double g = p.g0 * std::sqrt(nbar);
    double f = 2.0 * p.g0 * p.g0 * p.Omega * nbar / (p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma);
    std::vector<cplx> expect{cplx(-0.5 * p.kappa, p.Delta + f), cplx(-0.5 * p.kappa, -p.Delta - f),
                             cplx(-0.5 * p.Gamma, -p.Omega), cplx(-0.5 * p.Gamma, p.Omega)};
    auto ev = s.eigenvalues();
    for (const auto& e : expect) {
      double best = 1e300;
      for (Eigen::Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - e));
      REQUIRE(best < 5.0 * g);
    }
  }
  SECTION("conjugate-row symmetry") {
    auto s = build_linearized_optomech(p, 250.0);
    check_conjugate_rows(s.M, {1, 0, 3, 2});
  }
}

TEST_CASE("second-order optomechanical systems") {
  auto p = sample_params();
  double nbar = 400.0, mbar = 2.5;
  cplx bbar = I * p.g0 * nbar / (I * p.Omega + 0.5 * p.Gamma);

  SECTION("3x3 decomposes as N plus the mean perturbation") {
    auto s = build_second_order_optomech(p, nbar, mbar, bbar, 3);
    double gam = p.gamma_total();
    double F = p.g0 * nbar;
    double fp = p.g0 * (mbar + 1.0), fm = p.g0 * mbar;
    Eigen::Matrix3cd N;
    N << I * p.Delta - 0.5 * p.kappa, I * p.g0, I * p.g0,
        I * F, -I * (p.Omega - p.Delta) - 0.5 * gam, 0,
        -I * F, 0, I * (p.Omega + p.Delta) - 0.5 * gam;
    Eigen::Matrix3cd dN = Eigen::Matrix3cd::Zero();
    dN(1, 0) = I * fp;
    dN(2, 0) = I * fm;
    dN(1, 1) = I * cplx(p.g0) * bbar;
    dN(2, 2) = I * cplx(p.g0) * std::conj(bbar);
    REQUIRE((s.M - (N + dN)).norm() < 1e-14);
  }
  SECTION("vacuum asymmetry survives at zero means") {
    auto s = build_second_order_optomech(p, 0.0, 0.0, 0.0, 3);
    REQUIRE(s.M(1, 0) == cplx(0.0, p.g0));  // L+ = g0
    REQUIRE(s.M(2, 0) == cplx(0.0));        // L- = 0
  }
  SECTION("slaved substitution recovers the linearized frame") {
    auto s = build_second_order_optomech(p, nbar, 0.0, 0.0, 3, false);
    cplx frame = I * p.Delta - 0.5 * p.kappa;
    REQUIRE(std::abs(s.M(1, 1) - frame - cplx(-0.5 * p.Gamma, -p.Omega)) < 1e-14);
    REQUIRE(std::abs(s.M(2, 2) - frame - cplx(-0.5 * p.Gamma, p.Omega)) < 1e-14);
    REQUIRE(std::abs(s.M(0, 1) * std::sqrt(nbar) - I * p.g0 * std::sqrt(nbar)) < 1e-14);
  }
  SECTION("5x5 adds the one-photon two-phonon block") {
    auto s = build_second_order_optomech(p, nbar, mbar, bbar, 5);
    double theta = p.theta();
    REQUIRE(std::abs(s.M(3, 3) - cplx(-0.5 * theta, p.Delta - 2.0 * p.Omega)) < 1e-14);
    REQUIRE(std::abs(s.M(4, 4) - cplx(-0.5 * theta, p.Delta + 2.0 * p.Omega)) < 1e-14);
    REQUIRE(s.M(3, 1) == cplx(0.0, p.g0 * (mbar + 2.0 * nbar + 2.0)));
    REQUIRE(s.M(4, 2) == cplx(0.0, p.g0 * (mbar - 2.0 * nbar - 1.0)));
    REQUIRE(s.M(0, 3) == cplx(0.0));
    REQUIRE(s.noise_map(1, 0) == cplx(std::sqrt(0.5 * p.kappa * mbar)));
    REQUIRE(s.noise_map(3, 0) == cplx(0.5 * std::sqrt(p.kappa) * mbar));
    REQUIRE(s.noise_map(3, 1) == cplx(std::sqrt(p.Gamma * nbar * mbar)));
  }
  SECTION("6x6 couples b through the photon number") {
    auto s = build_second_order_optomech(p, nbar, mbar, bbar, 6);
    REQUIRE(s.M(1, 4) == cplx(0.0, p.g0));
    REQUIRE(std::abs(s.M(5, 5) - cplx(-p.kappa, 2.0 * (p.Delta + 2.0 * (cplx(p.g0) * bbar).real()))) <
            1e-14);
    REQUIRE(s.M(4, 4) == cplx(-p.kappa));
    REQUIRE(s.M(5, 2) == cplx(0.0, p.g0 * std::sqrt(nbar)));
  }
  SECTION("negative means rejected") {
    REQUIRE_THROWS_AS(build_second_order_optomech(p, -1.0, 0.0, 0.0, 3), std::invalid_argument);
  }
}

TEST_CASE("minimal basis system") {
  auto p = sample_params();
  auto s = build_minimal_optomech(p, 900.0, cplx(1.2, 0.3));

  SECTION("lower triangular, eigenvalues read off the diagonal") {
    REQUIRE(s.M(0, 1) == cplx(0.0));
    auto ev = s.eigenvalues();
    std::vector<cplx> expect{cplx(-2.0 * p.kappa, 0.0), cplx(-0.5 * p.gamma_total(), -p.Omega)};
    for (const auto& e : expect) {
      double best = 1e300;
      for (Eigen::Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - e));
      REQUIRE(best < 1e-12);
    }
  }
  SECTION("g0 = 0 decouples fully") {
    auto q = p;
    q.g0 = 0.0;
    auto s2 = build_minimal_optomech(q, 900.0, 0.0);
    REQUIRE(s2.M(1, 0) == cplx(0.0));
  }
}

TEST_CASE("quadratic 6x6 system") {
  QuadraticParams q;
  q.omega = 2.0;
  q.Omega = 1.5;
  q.eps = 3e-3;
  q.kappa = 0.02;
  q.Gamma = 1e-3;

  SECTION("eps = beta = 0 leaves the bare diagonals") {
    QuadraticParams z = q;
    z.eps = 0.0;
    z.beta_override = 0.0;
    auto s = build_quadratic(z, 5.0, 3.0, 1.0);
    REQUIRE((s.M - Eigen::MatrixXcd(s.M.diagonal().asDiagonal())).norm() < 1e-14);
    REQUIRE(s.M(0, 0) == cplx(-z.kappa, 2.0 * z.omega));
    REQUIRE(s.M(2, 2) == cplx(-z.kappa));
    REQUIRE(s.M(3, 3) == cplx(-z.Gamma, -2.0 * z.Omega));
    REQUIRE(s.M(5, 5) == cplx(-z.Gamma));
  }
  SECTION("beta = 0 closes the photon sector on itself") {
    QuadraticParams z = q;
    z.beta_override = 0.0;
    auto s = build_quadratic(z, 5.0, 3.0, 1.0);
    REQUIRE(s.M.block(0, 3, 3, 3).norm() == 0.0);
    REQUIRE(s.M.block(3, 0, 3, 2).norm() == 0.0);
    REQUIRE(std::abs(s.M(3, 2)) > 0.0);  // chi channel into the phonons
  }
  SECTION("conjugate-row symmetry") {
    auto s = build_quadratic(q, 5.0, 3.0, 1.0);
    check_conjugate_rows(s.M, {1, 0, 2, 4, 3, 5});
  }
  SECTION("frequency shifts match the engine expansion of the Hamiltonian") {
    auto o = OpSet::two_mode();
    double eps = q.eps, beta = q.beta();
    auto Xb = o.b + o.bd;
    auto Pa = o.a + o.ad;
    auto Pb = o.b - o.bd;
    auto H = q.omega * o.n + q.Omega * o.m + 0.5 * eps * multiply(o.n, multiply(Xb, Xb)) -
             0.5 * beta * multiply(multiply(Pa, Pa), multiply(Pb, Pb));
    auto Y = o.d + o.dd - o.m;
    auto expect = q.omega_eff() * o.n + q.Omega_eff() * o.m +
                  eps * multiply(o.n, o.d + o.dd + o.m) -
                  2.0 * beta * multiply(o.n + o.c + o.cd, Y) + beta * (o.c + o.cd) -
                  beta * (o.d + o.dd) + 0.5 * beta * o.one;
    REQUIRE((H - expect).max_abs_coeff() < 1e-14);
  }
  SECTION("exact operator equation of the number row") {
    auto o = OpSet::two_mode();
    double beta = q.beta();
    auto Y = o.d + o.dd - o.m;
    auto Hint = q.eps * multiply(o.n, o.d + o.dd + o.m) -
                2.0 * beta * multiply(o.n + o.c + o.cd, Y);
    auto rhs = cplx(0, -1) * commutator(o.n, Hint);
    auto expect = cplx(0, -4) * beta * multiply(o.c - o.cd, Y);
    REQUIRE((rhs - expect).max_abs_coeff() < 1e-13);
    REQUIRE(fock_identity_error(rhs, expect, 10) < 1e-10);
  }
}

TEST_CASE("cross-Kerr blocks and exact reduction") {
  double omega = 2.0, Omega = 1.0, kappa = 0.04, Gamma = 5e-4;
  double g = 1e-3, f = 0.3;

  SECTION("f = 0 diagonalizes the A block in the squared sector") {
    auto ck = build_cross_kerr(omega, Omega, kappa, Gamma, g, 0.0, 10.0, 1.0, 0.5);
    REQUIRE(ck.A(0, 1) == cplx(0.0));
    REQUIRE(ck.A(1, 0) == cplx(0.0));
    REQUIRE(ck.A(1, 1) == cplx(-1.0));
    REQUIRE(ck.B(1, 1) == cplx(-g / Omega));
  }
  SECTION("decoupling transformation kills the upper-right block") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      auto ck = build_cross_kerr(2.0 + u(rng), 1.0, 0.01 * u(rng), 1e-3 * u(rng), 0.01 * u(rng),
                                 0.2 * u(rng), 10.0, 1.0, 0.5);
      auto red = cross_kerr_reduction(ck);
      REQUIRE(red.coupling_norm < 1e-10);
    }
  }
  SECTION("closed-form witness solves its block equation") {
    auto ck = build_cross_kerr(omega, Omega, kappa, Gamma, g, f, 10.0, 1.0, 0.5);
    auto red = cross_kerr_reduction(ck);
    REQUIRE((red.V - ck.V_witness).norm() / red.V.norm() < 1e-9);
  }
  SECTION("witness singularity raises") {
    double lam = 0.02;
    double alpha = 0.5 * std::sqrt(lam * lam + 1.0);
    REQUIRE_THROWS_AS(
        build_cross_kerr(omega, Omega, 2.0 * lam * Omega, Gamma, g, alpha * Omega, 1.0, 1.0, 0.5),
        std::domain_error);
  }
  SECTION("reduced 3x3 has the printed structure") {
    auto ck = build_cross_kerr(omega, Omega, kappa, Gamma, g, f, 25.0, 1.0, 0.5);
    const auto& N = ck.reduced.M;
    double bn = 1.0 + ck.beta * 25.0, gm = ck.gamma_l[0];
    REQUIRE(std::abs(N(0, 0) - cplx(-gm, -bn)) < 1e-14);
    REQUIRE(std::abs(N(1, 1) - cplx(-gm, bn)) < 1e-14);
    REQUIRE(std::abs(N(2, 0) - cplx(0.0, 2.0 * ck.alpha)) < 1e-14);
    REQUIRE(std::abs(N(2, 2) - cplx(-gm, 0.0)) < 1e-14);
  }
}

TEST_CASE("anharmonic oscillator system") {
  double omega = 1.3, zeta = 2e-3, Gamma2 = 1e-2;

  SECTION("zeta = 0 is harmonic with only rotation and damping") {
    auto s = build_anharmonic(omega, 0.0, Gamma2, 1.0);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (r != c) REQUIRE(std::abs(s.M(r, c)) < 1e-13);
    REQUIRE(std::abs(s.M(0, 0) - cplx(-0.5 * Gamma2, -2.0 * omega)) < 1e-13);
  }
  SECTION("hand-checked couplings in the c row") {
    double nbar = 1.5;
    auto s = build_anharmonic(omega, zeta, Gamma2, nbar);
    // [c, n^2] = 4 nc + 4c feeds 12 i zeta * nc from the -3 zeta n^2 term;
    // [c, c†n] = (3/2) n^2 feeds 6 i zeta * n^2 from -4 zeta (nc + c†n)
    REQUIRE(std::abs(s.M(0, 6) - cplx(0.0, 12.0 * zeta)) < 1e-12);
    REQUIRE(std::abs(s.M(0, 3) - cplx(0.0, 6.0 * zeta)) < 1e-12);
    REQUIRE(std::abs(s.M(0, 4) - cplx(0.0, 8.0 * zeta)) < 1e-12);
    REQUIRE(std::abs(s.drive(0) - cplx(0.0, 3.0 * zeta)) < 1e-12);
  }
  SECTION("Heisenberg evolution on a small Fock space follows M") {
    double nbar = 1.2;
    auto s = build_anharmonic(omega, zeta, 0.0, nbar);
    auto sm = OpSet::one_mode();
    auto c2 = multiply(sm.c, sm.c), cd2 = multiply(sm.cd, sm.cd);
    auto nc = multiply(sm.n, sm.c), cdn = multiply(sm.cd, sm.n);
    auto n2 = multiply(sm.n, sm.n);
    std::vector<OperatorPolynomial> basis{sm.c, sm.cd, sm.n, n2, c2, cd2, nc, cdn};
    OperatorPolynomial H = (omega - 3.0 * zeta) * sm.n - 3.0 * zeta * n2 -
                           2.0 * zeta * (c2 + cd2 + 3.0 * (sm.c + sm.cd)) -
                           4.0 * zeta * (nc + cdn);
    const int cutoff = 18;
    CutoffMap cut{cutoff};
    auto Hm = fock_matrix(H, cut);
    Eigen::VectorXcd psi(cutoff);
    double a0 = std::sqrt(nbar);
    for (int n = 0; n < cutoff; ++n)
      psi(n) = std::pow(a0, n) / std::sqrt(std::tgamma(n + 1.0));
    psi.normalize();
    Eigen::VectorXcd Abar(8), dAdt(8);
    for (int j = 0; j < 8; ++j) {
      auto Bm = fock_matrix(basis[j], cut);
      Abar(j) = psi.dot(Bm * psi);
      Eigen::MatrixXcd comm = Bm * Hm - Hm * Bm;
      dAdt(j) = -I * psi.dot(comm * psi);
    }
    Eigen::VectorXcd pred = s.M * Abar + s.drive;
    double scale = dAdt.cwiseAbs().maxCoeff();
    // rows whose commutators close exactly in the basis are machine-accurate;
    // the remaining rows carry the mean-field closure error
    for (int j : {0, 1, 2}) REQUIRE(std::abs(pred(j) - dAdt(j)) < 1e-9 * scale);
    for (int j : {3, 4, 5, 6, 7}) REQUIRE(std::abs(pred(j) - dAdt(j)) < 0.2 * scale);
  }
}

TEST_CASE("quantum limited amplifier") {
  double omega = 1.0, Gamma2 = 0.02;

  SECTION("g = 0 decouples and conserves the number row") {
    auto s = build_qla(omega, 0.0, Gamma2, 2.0);
    REQUIRE(s.M.row(0).norm() == 0.0);
    REQUIRE(std::abs(s.M(1, 1) - cplx(-(2.0 * 2.0 + 1.0) * Gamma2 / 4.0, -2.0 * omega)) < 1e-14);
  }
  SECTION("unconditionally stable for random positive parameters") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    for (int i = 0; i < 40; ++i) {
      auto s = build_qla(u(rng), cplx(u(rng), u(rng) - 2.0), u(rng), u(rng));
      REQUIRE(s.max_real_eigenvalue() < 0.0);
    }
  }
  SECTION("c rows follow the exact commutators") {
    cplx g(0.3, 0.1);
    auto s = build_qla(omega, g, Gamma2, 2.5);
    REQUIRE(s.M(1, 0) == -I * std::conj(g));
    REQUIRE(s.M(2, 0) == I * g);
    REQUIRE(s.drive(1) == -0.5 * I * std::conj(g));
  }
}

TEST_CASE("QND readout system") {
  double omega = 1.0, Omega = 0.3, chi = 1e-2, kappa = 0.05, Gamma = 1e-3;

  SECTION("chi = 0 decouples number and signal") {
    auto s = build_qnd(omega, Omega, 0.0, kappa, Gamma, 20.0);
    REQUIRE(s.M(3, 1) == cplx(0.0));
    REQUIRE(s.M(0, 1) == cplx(0.0));
  }
  SECTION("signal untouched by probe decay at Gamma = 0") {
    auto s = build_qnd(omega, Omega, chi, kappa, 0.0, 20.0);
    REQUIRE(s.M.row(1).norm() == 0.0);
  }
  SECTION("quadrature commutator linearization against the Fock oracle") {
    // exact (1/2)(n+2)^-1 on the Fock ladder against the scalar
    // (1/2)(nbar+2)^-1 at the nearest occupation
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(10.0, 500.0);
    for (int i = 0; i < 30; ++i) {
      double nbar = u(rng);
      int cutoff = int(nbar) + 8;
      Eigen::VectorXd exact(cutoff);
      for (int n = 0; n < cutoff; ++n) exact(n) = 0.5 / (n + 2.0);
      double scalar = 0.5 / (nbar + 2.0);
      double ref = exact(int(std::lround(nbar)));
      REQUIRE(std::abs(scalar - ref) / scalar < 0.05);
    }
  }
}
