#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hoops/spectra.hpp"
#include "hoops/steady_state.hpp"

using namespace hoops;
using Catch::Approx;

namespace {

LangevinSystem single_mode(double Delta, double kappa, double S_plus = 0.5,
                           double S_minus = 0.5) {
  LangevinSystem s;
  s.basis_labels = {"a"};
  s.M.resize(1, 1);
  s.M(0, 0) = cplx(-0.5 * kappa, Delta);
  s.noise_map.resize(1, 1);
  s.noise_map(0, 0) = std::sqrt(kappa);
  s.channels = {{"a_in", S_plus, S_minus, {}}};
  s.drive = Eigen::VectorXcd::Zero(1);
  s.decay_rates = (Eigen::VectorXd(1) << kappa).finished();
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / double(n - 1);
  return v;
}

double window_area(const SpectrumSeries& s, double lo, double hi) {
  double acc = 0.0;
  for (std::size_t i = 1; i < s.freqs.size(); ++i)
    if (s.freqs[i] >= lo && s.freqs[i] <= hi)
      acc += 0.5 * (s.values[i] + s.values[i - 1]) * (s.freqs[i] - s.freqs[i - 1]);
  return acc;
}

}  // namespace

TEST_CASE("port scattering of a side-coupled mode") {
  double Delta = 0.3, kappa = 0.08;
  auto s = single_mode(Delta, kappa);

  SECTION("all-pass and full phase flip on resonance") {
    for (double w : linspace(-3.0, 3.0, 101)) {
      auto S = scattering_matrix(s, w);
      REQUIRE(std::abs(std::abs(S(0, 0)) - 1.0) < 1e-10);
    }
    auto S0 = scattering_matrix(s, Delta);
    REQUIRE(std::abs(S0(0, 0) + 1.0) < 1e-12);
  }
  SECTION("lossless resonance names the singular frequency") {
    LangevinSystem l = s;
    l.M(0, 0) = cplx(0.0, Delta);
    REQUIRE_THROWS_WITH(scattering_matrix(l, Delta),
                        Catch::Matchers::ContainsSubstring("singular resolvent"));
  }
  SECTION("g0 = 0 optomechanics scatters block-diagonally") {
    OptomechParams p;
    p.Omega = 1.0;
    p.kappa = 0.05;
    p.Gamma = 1e-4;
    p.g0 = 0.0;
    p.Delta = 0.2;
    auto sys = build_linearized_optomech(p, 100.0);
    auto S = scattering_matrix(sys, 0.37);
    REQUIRE(S.block(0, 2, 2, 2).norm() < 1e-14);
    REQUIRE(S.block(2, 0, 2, 2).norm() < 1e-14);
  }
}

TEST_CASE("closed-form reduced scattering row") {
  OptomechParams p;
  p.Omega = 1.0;
  p.kappa = 0.05;
  p.Gamma = 1e-4;
  p.g0 = 1e-3;
  p.Delta = 0.13;
  double nbar = 5e3, mbar = 37.0;
  cplx bbar = 0.0;
  auto sys = build_second_order_optomech(p, nbar, mbar, bbar, 3, false);
  for (double w : linspace(-2.5, 2.5, 401)) {
    auto S = scattering_matrix_ports(sys, w);
    auto cf = scattering_row3_closed(p, nbar, mbar, w);
    REQUIRE(std::abs(S(0, 0) - cf.S11) < 1e-10);
    REQUIRE(std::abs(S(0, 1) - cf.S12) < 1e-10);
    REQUIRE(std::abs(S(0, 2) - cf.S13) < 1e-10);
  }
}

TEST_CASE("output spectra") {
  SECTION("vacuum input through a lossless-coupled mode is flat one half") {
    auto s = single_mode(0.4, 0.06);
    auto spec = output_spectrum(s, linspace(-2.0, 2.0, 301));
    for (double v : spec.values) REQUIRE(v == Approx(0.5).epsilon(1e-12));
  }
  SECTION("higher-order 3x3 matches the linearized 4x4 at low pump") {
    OptomechParams p;
    p.Omega = 1.0;
    p.kappa = 0.05;
    p.Gamma = 1e-3;
    p.g0 = 1e-5;
    p.Delta = 0.0;
    p.m_th = 0.5;
    double nbar = 1e4;  // g0 sqrt(nbar)/Omega = 1e-3
    auto mph = coherent_phonons(p, 0.0, nbar);
    cplx bbar = I * p.g0 * nbar / (I * p.Omega + 0.5 * p.Gamma);
    auto lin4 = build_linearized_optomech(p, nbar);
    for (auto& ch : lin4.channels) {
      double s = ch.symmetrized();
      ch.S_plus = ch.S_minus = s;
    }
    auto ho3 = build_second_order_optomech(p, nbar, mph.mbar, bbar, 3);
    auto sil = optomech_silents(p, nbar, mph.mbar);
    for (double w : {0.0, -p.Omega, p.Omega}) {
      auto grid = linspace(w - 1e-6, w + 1e-6, 9);
      double a = output_spectrum(lin4, grid).values[4];
      double b = multiplicative_spectrum(ho3, sil, grid, 0.5, p.m_th + 0.5, p.gamma_total(),
                                         p.theta())
                     .values[4];
      REQUIRE(std::abs(a - b) / a < 0.01);
    }
  }
  SECTION("thermal side-band area ratio approaches (m+1)/m") {
    OptomechParams p;
    p.Omega = 1.0;
    p.kappa = 2e-3;
    p.Gamma = 1e-4;
    p.g0 = 1e-4;
    p.Delta = 0.0;
    p.m_th = 2.0;
    double nbar = 1e4;
    auto lin4 = build_linearized_optomech(p, nbar);
    double halfwin = 30.0 * p.Gamma;
    auto grid_red = linspace(p.Omega - halfwin, p.Omega + halfwin, 4001);
    auto grid_blue = linspace(-p.Omega - halfwin, -p.Omega + halfwin, 4001);
    auto sr = output_spectrum(lin4, grid_red);
    auto sb = output_spectrum(lin4, grid_blue);
    // subtract the flat background before integrating the line
    double bg_r = sr.values.front(), bg_b = sb.values.front();
    for (auto& v : sr.values) v = std::max(0.0, v - bg_r);
    for (auto& v : sb.values) v = std::max(0.0, v - bg_b);
    double ratio = window_area(sr, p.Omega - halfwin, p.Omega + halfwin) /
                   window_area(sb, -p.Omega - halfwin, -p.Omega + halfwin);
    REQUIRE(ratio == Approx((p.m_th + 1.0) / p.m_th).epsilon(0.05));
  }
}

TEST_CASE("multiplicative noise assembly") {
  OptomechParams p;
  p.Omega = 1.0;
  p.kappa = 0.05;
  p.Gamma = 1e-3;
  p.g0 = 5e-4;
  p.Delta = 0.0;
  p.alpha = 3.0;
  auto root = photon_number_cubic(p).front();
  double nbar = root.nbar;
  auto mph = coherent_phonons(p, p.Delta, nbar);
  auto sys3 = build_second_order_optomech(p, nbar, mph.mbar, root.bbar, 3);
  auto silents = optomech_silents(p, nbar, mph.mbar);

  SECTION("constant silent factors reduce to scaled port scattering") {
    OptomechSilents consts;
    consts.abar.delta_weight = cplx(0.7, -0.2);
    auto grid = linspace(-2.0, 2.0, 257);
    auto spec = multiplicative_spectrum(sys3, consts, grid, 0.5, 1.0, p.gamma_total(), p.theta());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto Y = scattering_matrix_ports(sys3, grid[i]);
      double expect = std::norm(Y(0, 0)) * 0.5 +
                      std::norm((Y(0, 1) + Y(0, 2)) * consts.abar.delta_weight) /
                          (p.gamma_total() * p.gamma_total());
      REQUIRE(spec.values[i] == Approx(expect).epsilon(1e-12));
    }
  }
  SECTION("FFT convolution equals direct quadrature") {
    auto grid = linspace(-1.5, 1.5, 64);
    std::vector<cplx> Y(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto S = scattering_matrix_ports(sys3, grid[i]);
      Y[i] = S(0, 1) + S(0, 2);
    }
    auto a = detail::convolve_silent(grid, Y, silents.abar, false);
    auto b = detail::convolve_silent(grid, Y, silents.abar, true);
    for (std::size_t i = 0; i < grid.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) < 1e-8);
  }
  SECTION("mechanical silent factor peaks at minus Omega") {
    double best_w = 0.0, best = -1.0;
    for (double w : linspace(-2.0, 2.0, 2001)) {
      double v = std::abs(silents.bbar.eval(w));
      if (v > best) {
        best = v;
        best_w = w;
      }
    }
    REQUIRE(best_w == Approx(-p.Omega).margin(2e-3));
  }
  SECTION("second-order side-bands only in the five-dimensional system") {
    OptomechParams q = p;
    q.kappa = 0.02;
    q.Gamma = 5e-4;
    q.g0 = 2e-3;
    q.alpha = 8.0;
    auto r = photon_number_cubic(q).front();
    auto ph = coherent_phonons(q, q.Delta, r.nbar);
    auto s3 = build_second_order_optomech(q, r.nbar, ph.mbar, r.bbar, 3);
    auto s5 = build_second_order_optomech(q, r.nbar, ph.mbar, r.bbar, 5);
    auto sil = optomech_silents(q, r.nbar, ph.mbar);
    auto grid = linspace(1.7 * q.Omega, 2.3 * q.Omega, 1201);
    auto sp3 = multiplicative_spectrum(s3, sil, grid, 0.5, q.m_th + 0.5, q.gamma_total(),
                                       q.theta());
    auto sp5 = multiplicative_spectrum(s5, sil, grid, 0.5, q.m_th + 0.5, q.gamma_total(),
                                       q.theta());
    auto feature = [&](const SpectrumSeries& s, double& at) {
      double dev = 0.0;
      for (std::size_t i = 0; i < s.values.size(); ++i)
        if (std::abs(s.values[i] - 0.5) > dev) {
          dev = std::abs(s.values[i] - 0.5);
          at = s.freqs[i];
        }
      return dev;
    };
    double at5 = 0.0, at3 = 0.0;
    double d5 = feature(sp5, at5), d3 = feature(sp3, at3);
    REQUIRE(d5 > 50.0 * d3);
    REQUIRE(at5 > 1.8 * q.Omega);
    REQUIRE(at5 < 2.1 * q.Omega);
  }
}

TEST_CASE("first-order spectrum recovery") {
  SECTION("vacuum passthrough is exact") {
    SpectrumSeries in;
    in.freqs = linspace(0.0, 63.0, 64);
    in.values.assign(64, 0.5);
    auto out = recover_first_order(in, RecoveryMode::fourier_sqrt);
    for (double v : out.values) REQUIRE(v == Approx(0.5).margin(1e-12));
  }
  SECTION("gaussian peak maps to half frequency") {
    SpectrumSeries in;
    in.freqs = linspace(0.0, 10.0, 2001);
    in.values.resize(in.freqs.size());
    double s1 = 2.0, w1 = 6.0, dw1 = 0.15;
    for (std::size_t i = 0; i < in.freqs.size(); ++i) {
      double x = in.freqs[i] - w1;
      in.values[i] = s1 * std::exp(-x * x / (dw1 * dw1));
    }
    auto out = recover_first_order(in, RecoveryMode::gaussian_peaks);
    std::size_t kbest = 0;
    for (std::size_t i = 0; i < out.values.size(); ++i)
      if (out.values[i] > out.values[kbest]) kbest = i;
    REQUIRE(out.freqs[kbest] == Approx(0.5 * w1).margin(0.02));
    double peak = out.values[kbest];
    double expect_peak = 2.0 * M_PI * std::sqrt(M_PI) * s1 * w1 * w1 / dw1;
    REQUIRE(peak == Approx(expect_peak).epsilon(0.01));
    // width from the half-maximum crossing: sigma = dw1
    double half = peak / 2.0;
    double whalf = 0.0;
    for (std::size_t i = kbest; i < out.values.size(); ++i)
      if (out.values[i] < half) {
        whalf = out.freqs[i];
        break;
      }
    double sigma = (whalf - out.freqs[kbest]) / std::sqrt(2.0 * std::log(2.0));
    REQUIRE(sigma == Approx(dw1).epsilon(0.05));
  }
  SECTION("synthetic squared-process round trip") {
    const int N = 256, segs = 100000;
    std::vector<double> SBB(N);
    // bump centered at bin zero, wrapped
    double A = 3.0, sig = 18.0;  // averaging depth set by the sqrt-bias of the estimator
    for (int k = 0; k < N; ++k) {
      double d = std::min(double(k), double(N - k));
      SBB[k] = 0.5 + A * std::exp(-d * d / (2.0 * sig * sig));
    }
    std::mt19937_64 rng(123);
    std::normal_distribution<double> N01(0.0, 1.0);
    std::vector<double> SDD(N, 0.0);
    for (int s = 0; s < segs; ++s) {
      std::vector<cplx> bt(N);
      for (int k = 0; k < N; ++k) {
        double Sb = 2.0 * (SBB[k] - 0.5);
        bt[k] = std::sqrt(0.5 * Sb * N) * cplx(N01(rng), N01(rng));
      }
      fft(bt, true);  // to time domain
      for (int t = 0; t < N; ++t) bt[t] = 0.5 * bt[t] * bt[t];
      fft(bt, false);
      for (int k = 0; k < N; ++k) SDD[k] += std::norm(bt[k]) / double(N) / segs;
    }
    SpectrumSeries in;
    in.freqs = linspace(0.0, N - 1.0, N);
    in.values.resize(N);
    for (int k = 0; k < N; ++k) in.values[k] = 0.5 + SDD[k];
    auto out = recover_first_order(in, RecoveryMode::fourier_sqrt, 0.02);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < N; ++k) {
      num += std::pow(out.values[k] - SBB[k], 2);
      den += std::pow(SBB[k], 2);
    }
    REQUIRE(std::sqrt(num / den) < 0.05);
  }
  SECTION("large negative lobes abort with the offender") {
    SpectrumSeries in;
    in.freqs = linspace(0.0, 63.0, 64);
    in.values.assign(64, 0.5);
    in.values[10] = 0.4;  // a dip below the floor
    REQUIRE_THROWS_WITH(recover_first_order(in, RecoveryMode::fourier_sqrt),
                        Catch::Matchers::ContainsSubstring("negative argument"));
  }
}

TEST_CASE("squared-noise spectral density") {
  double chi = 0.03, omega = 2.0;
  auto grid = linspace(2.0 * omega - 20.0 * chi * omega, 2.0 * omega + 20.0 * chi * omega, 20001);
  auto s = squared_noise_spectrum(chi, omega, grid);

  SECTION("peak sits at the doubled frequency") {
    std::size_t kbest = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i] > s.values[kbest]) kbest = i;
    REQUIRE(s.freqs[kbest] == Approx(2.0 * omega).margin(1e-3));
  }
  SECTION("integral equals 2 chi^2 / pi") {
    double integral = window_area(s, s.freqs.front(), s.freqs.back());
    REQUIRE(integral == Approx(2.0 * chi * chi / M_PI).epsilon(1e-8));
  }
  SECTION("vanishes off-resonance as chi goes to zero") {
    double w = 2.0 * omega + 0.5;
    for (double c : {0.03, 0.01, 0.003}) {
      auto v = squared_noise_spectrum(c, omega, {w - 1.0, w, w + 1.0}).values[1];
      REQUIRE(v < squared_noise_spectrum(2.0 * c, omega, {w - 1.0, w, w + 1.0}).values[1]);
    }
    REQUIRE(squared_noise_spectrum(1e-3, omega, {w - 1.0, w, w + 1.0}).values[1] < 1e-300);
  }
}

TEST_CASE("g2(0) forms") {
  SECTION("gaussian zero-delay values") {
    double nbar = 0.7;
    REQUIRE(g2_zero(1.0, 1.0, nbar) ==
            Approx(4.0 * (0.5 - nbar) / (nbar * nbar)).epsilon(1e-12));
  }
  SECTION("threshold photon number is sqrt(6) - 2") {
    double lo = 0.1, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (g2_zero(1.0, 1.0, mid) > 1.0) lo = mid; else hi = mid;
    }
    REQUIRE(std::abs(0.5 * (lo + hi) - (std::sqrt(6.0) - 2.0)) < 1e-12);
  }
  SECTION("half a photon gives zero") {
    REQUIRE(g2_zero(1.0, 1.0, 0.5) == Approx(0.0).margin(1e-14));
  }
  SECTION("integral form agrees with the correlator form") {
    // S_CC a narrow gaussian with known area Psi0(Psi0+Ups0)/2
    double P0 = 1.3, U0 = 0.8, nbar = 2.0;
    double area = 0.5 * P0 * (P0 + U0);
    auto grid = linspace(-5.0, 5.0, 40001);
    SpectrumSeries s;
    s.freqs = grid;
    s.values.resize(grid.size());
    double sg = 0.2;
    for (std::size_t i = 0; i < grid.size(); ++i)
      s.values[i] = area / (sg * std::sqrt(2.0 * M_PI)) *
                    std::exp(-grid[i] * grid[i] / (2.0 * sg * sg));
    REQUIRE(g2_zero(s, nbar) == Approx(g2_zero(P0, U0, nbar)).epsilon(1e-6));
  }
  SECTION("undefined at zero occupation") {
    REQUIRE_THROWS_AS(g2_zero(1.0, 1.0, 0.0), std::invalid_argument);
  }
}
