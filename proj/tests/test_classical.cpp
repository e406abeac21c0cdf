#include <catch2/catch_amalgamated.hpp>

#include "hoops/classical.hpp"

using namespace hoops;
using Catch::Approx;

TEST_CASE("exponential-nonlinearity circuit") {
  CircuitParams p;
  p.tau = 1.0;
  p.mu = 0.7;
  p.kappa = 1.3;
  p.V0 = 0.8;
  p.alpha_d = 0.05;
  p.omega_d = 2.0;
  p.order = 6;

  SECTION("matrix entries follow the series expansion") {
    auto s = build_circuit_system(p);
    REQUIRE(s.M(0, 1) == Approx(-p.kappa / 2.0 / p.tau));
    REQUIRE(s.M(0, 2) == Approx(-p.kappa / 6.0 / p.tau));
    for (int j = 1; j <= p.order; ++j)
      REQUIRE(s.M(j - 1, j - 1) == Approx(-j * (p.mu + p.kappa) / p.tau));
    REQUIRE(s.M(2, 1) == 0.0);  // strictly upper triangular couplings
  }
  SECTION("series coefficients against a numeric expansion oracle") {
    // j kappa u^{j-1} (e^u - 1) expanded to high order reproduces the row
    CircuitParams q = p;
    q.order = 20;
    auto s = build_circuit_system(q);
    for (int j = 1; j <= 8; ++j) {
      for (double u : {0.1, 0.3, -0.2}) {
        double exact = -double(j) * q.kappa * std::pow(u, j - 1) * std::expm1(u) / q.tau -
                       double(j) * q.mu * std::pow(u, j) / q.tau;
        double series = 0.0;
        for (int k = j; k <= q.order; ++k) series += s.M(j - 1, k - 1) * std::pow(u, k);
        REQUIRE(series == Approx(exact).margin(1e-12));
      }
    }
  }
  SECTION("first-order truncation is the fully linearized circuit") {
    CircuitParams q = p;
    q.order = 1;
    auto s = build_circuit_system(q);
    REQUIRE(s.M.rows() == 1);
    REQUIRE(s.M(0, 0) == Approx(-(q.mu + q.kappa) / q.tau));
  }
  SECTION("undriven circuit stays at the fixed point") {
    CircuitParams q = p;
    q.V0 = 0.0;
    auto w = circuit_mean_field(q, 10.0, 1e-3);
    for (double v : w.values) REQUIRE(v == 0.0);
    auto wt = circuit_truncated(q, 10.0, 1e-3);
    for (double v : wt.values) REQUIRE(v == 0.0);
  }
  SECTION("small-signal response approaches the linear truncation quadratically") {
    auto err_at = [&](double V0) {
      CircuitParams q = p;
      q.V0 = V0;
      q.order = 1;
      auto lin = circuit_truncated(q, 12.0, 1e-3);
      auto mf = circuit_mean_field(q, 12.0, 1e-3);
      double e = 0.0;
      for (std::size_t k = 0; k < lin.values.size(); ++k)
        e = std::max(e, std::abs(lin.values[k] - mf.values[k]));
      return e;
    };
    double e1 = err_at(0.04), e2 = err_at(0.02);
    REQUIRE(e1 / e2 == Approx(4.0).margin(1.0));
  }
  SECTION("truncation error decreases monotonically to the oracle") {
    auto oracle = circuit_mean_field(p, 15.0, 1e-3);
    double prev = std::numeric_limits<double>::infinity();
    double err1 = 0.0, err6 = 0.0;
    for (int K = 1; K <= 6; ++K) {
      CircuitParams q = p;
      q.order = K;
      auto w = circuit_truncated(q, 15.0, 1e-3);
      double e = 0.0;
      for (std::size_t k = 0; k < w.values.size(); ++k)
        e = std::max(e, std::abs(w.values[k] - oracle.values[k]));
      REQUIRE(e <= prev * (1.0 + 1e-12));
      if (K == 1) err1 = e;
      if (K == 6) err6 = e;
      prev = e;
    }
    REQUIRE(err6 < 0.1 * err1);
  }
  SECTION("truncated system superposes exactly") {
    auto s = build_circuit_system(p, 0.1);
    auto w1 = integrate_circuit(p, s, 8.0, 1e-3);
    CircuitParams q = p;
    q.V0 = 2.0 * p.V0;
    auto w2 = integrate_circuit(q, s, 8.0, 1e-3);
    for (std::size_t k = 0; k < w1.values.size(); ++k)
      REQUIRE(w2.values[k] == Approx(2.0 * w1.values[k]).margin(1e-12));
  }
  SECTION("stiffness warning fires for oversized steps") {
    CircuitParams q = p;
    q.kappa = 30.0;
    q.V0 = 2.0;
    bool warn = false;
    circuit_mean_field(q, 2.0, 0.05, &warn);
    REQUIRE(warn);
  }
}

TEST_CASE("Kuramoto model") {
  KuramotoParams q;
  q.Omega = {1.0, 1.31, 0.77};
  q.psi = 0.0;
  q.x0 = {1.0, 0.4, -0.6};
  q.p0 = {0.0, 0.8, 0.3};

  SECTION("uncoupled oscillators conserve their actions") {
    double T = 1000.0 * 2.0 * M_PI, dt = 8e-3;
    auto tr = kuramoto_integrate(q, KuramotoForm::cartesian, T, dt);
    for (int j = 0; j < q.N(); ++j) {
      double I0 = 0.5 * (q.x0[j] * q.x0[j] + q.p0[j] * q.p0[j]);
      double IT = 0.5 * (tr.x.back()(j) * tr.x.back()(j) + tr.p.back()(j) * tr.p.back()(j));
      REQUIRE(std::abs(IT - I0) < 1e-8);
    }
  }
  SECTION("dual forms agree through the canonical transform") {
    auto c = q;
    c.psi = 0.05;
    double T = 100.0 * 2.0 * M_PI, dt = 2e-3;
    auto a = kuramoto_integrate(c, KuramotoForm::cartesian, T, dt);
    auto b = kuramoto_integrate(c, KuramotoForm::action_angle, T, dt);
    for (int j = 0; j < c.N(); ++j) {
      REQUIRE(std::abs(a.x.back()(j) - b.x.back()(j)) < 1e-6);
      REQUIRE(std::abs(a.p.back()(j) - b.p.back()(j)) < 1e-6);
    }
  }
  SECTION("energy conserved, total action not") {
    auto c = q;
    c.psi = 0.2;
    double T = 200.0, dtA = 0.01, dtB = 0.02;
    auto drift = [&](double dt) {
      auto tr = kuramoto_integrate(c, KuramotoForm::cartesian, T, dt);
      double d = 0.0;
      for (double e : tr.energy) d = std::max(d, std::abs(e - tr.energy.front()));
      return d;
    };
    double dA = drift(dtA), dB = drift(dtB);
    REQUIRE(dA < 1e-8);
    REQUIRE(dB / dA > 8.0);  // fourth-order scaling of the energy error
    // the antisymmetrized coupling exchanges action between oscillators while
    // conserving the total
    auto tr = kuramoto_integrate(c, KuramotoForm::cartesian, T, dtA);
    double exch = 0.0, total_dev = 0.0;
    double S0 = 0.0;
    std::vector<double> I0(c.N());
    for (int j = 0; j < c.N(); ++j) {
      I0[j] = 0.5 * (tr.x.front()(j) * tr.x.front()(j) + tr.p.front()(j) * tr.p.front()(j));
      S0 += I0[j];
    }
    for (std::size_t k = 0; k < tr.times.size(); k += 50) {
      double S = 0.0;
      for (int j = 0; j < c.N(); ++j) {
        double Ij = 0.5 * (tr.x[k](j) * tr.x[k](j) + tr.p[k](j) * tr.p[k](j));
        exch = std::max(exch, std::abs(Ij - I0[j]));
        S += Ij;
      }
      total_dev = std::max(total_dev, std::abs(S - S0));
    }
    REQUIRE(exch > 1e-3);
    REQUIRE(total_dev < 1e-8);
  }
  SECTION("action-angle form rejects the coordinate singularity") {
    auto c = q;
    c.psi = 0.1;
    c.x0[1] = 0.0;
    c.p0[1] = 0.0;
    REQUIRE_THROWS_AS(kuramoto_integrate(c, KuramotoForm::action_angle, 1.0, 1e-3),
                      std::domain_error);
  }
}
