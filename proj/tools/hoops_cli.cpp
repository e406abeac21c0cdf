// hoops - batch front-end: config ingestion, subcommand dispatch, sweep
// orchestration, deterministic seeding, CSV/JSON emission.
//
// Usage: hoops <task> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "hoops/classical.hpp"
#include "hoops/dynamics.hpp"
#include "hoops/identities.hpp"
#include "hoops/io.hpp"
#include "hoops/observables.hpp"
#include "hoops/spectra.hpp"
#include "hoops/steady_state.hpp"

namespace fs = std::filesystem;
using hoops::json;

namespace {

constexpr double TWO_PI = 2.0 * M_PI;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

double need_num(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double opt_num(const json& j, const std::string& key, double def) {
  return j.contains(key) ? j.at(key).get<double>() : def;
}

hoops::OptomechParams parse_optomech(const json& m) {
  require_keys(m, "model",
               {"type", "Omega_Hz", "kappa_Hz", "Gamma_Hz", "g0_Hz", "Delta_Hz", "alpha",
                "alpha_im", "m_th", "temperature_K"});
  hoops::OptomechParams p;
  p.Omega = TWO_PI * need_num(m, "Omega_Hz", "model");
  p.kappa = TWO_PI * need_num(m, "kappa_Hz", "model");
  p.Gamma = TWO_PI * need_num(m, "Gamma_Hz", "model");
  p.g0 = TWO_PI * need_num(m, "g0_Hz", "model");
  p.Delta = TWO_PI * opt_num(m, "Delta_Hz", 0.0);
  p.alpha = hoops::cplx(opt_num(m, "alpha", 0.0), opt_num(m, "alpha_im", 0.0));
  if (m.contains("temperature_K"))
    p.m_th = hoops::OptomechParams::thermal_occupation(p.Omega, m.at("temperature_K").get<double>());
  else
    p.m_th = opt_num(m, "m_th", 0.0);
  p.validate();
  return p;
}

hoops::QuadraticParams parse_quadratic(const json& m) {
  require_keys(m, "model",
               {"type", "omega_Hz", "Omega_Hz", "eps_Hz", "beta_Hz", "kappa_Hz", "Gamma_Hz",
                "alpha"});
  hoops::QuadraticParams q;
  q.omega = TWO_PI * need_num(m, "omega_Hz", "model");
  q.Omega = TWO_PI * need_num(m, "Omega_Hz", "model");
  q.eps = TWO_PI * need_num(m, "eps_Hz", "model");
  if (m.contains("beta_Hz")) q.beta_override = TWO_PI * m.at("beta_Hz").get<double>();
  q.kappa = TWO_PI * need_num(m, "kappa_Hz", "model");
  q.Gamma = TWO_PI * need_num(m, "Gamma_Hz", "model");
  q.alpha = opt_num(m, "alpha", 0.0);
  return q;
}

hoops::FrequencyGrid parse_grid(const json& g) {
  require_keys(g, "grid", {"start_Hz", "stop_Hz", "points", "scale"});
  hoops::FrequencyGrid fg;
  fg.start = TWO_PI * need_num(g, "start_Hz", "grid");
  fg.stop = TWO_PI * need_num(g, "stop_Hz", "grid");
  fg.points = int(need_num(g, "points", "grid"));
  if (g.contains("scale")) {
    std::string s = g.at("scale").get<std::string>();
    if (s != "linear" && s != "log") throw ValidationError("grid: scale must be linear|log");
    fg.log_scale = s == "log";
  }
  return fg;
}

std::vector<double> axis_values(const json& ax) {
  require_keys(ax, "sweep axis", {"name", "start", "stop", "points", "scale"});
  int n = int(need_num(ax, "points", "axis"));
  double a = need_num(ax, "start", "axis"), b = need_num(ax, "stop", "axis");
  bool logs = ax.contains("scale") && ax.at("scale") == "log";
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    double t = n > 1 ? double(i) / (n - 1) : 0.0;
    v[i] = logs ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a);
  }
  return v;
}

struct RunContext {
  json config;
  fs::path out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
};

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  f << s;
}

json echo_config(const RunContext& rc) {
  json echo = rc.config;
  echo["effective_seed"] = rc.seed;
  if (echo.contains("model")) {
    json ang;
    for (auto it = echo["model"].begin(); it != echo["model"].end(); ++it) {
      std::string k = it.key();
      if (k.size() > 3 && k.substr(k.size() - 3) == "_Hz" && it.value().is_number())
        ang[k.substr(0, k.size() - 3) + "_rad_s"] = TWO_PI * it.value().get<double>();
    }
    echo["model_angular"] = ang;
  }
  return echo;
}

// ---------------------------------------------------------------------------

int task_identity(const RunContext& rc) {
  const auto& cfg = rc.config;
  int k = int(opt_num(cfg.contains("identity") ? cfg["identity"] : json::object(), "k", 1));
  std::vector<long long> terms = {1000, 10000, 100000, 1000000};
  if (cfg.contains("identity") && cfg["identity"].contains("terms")) {
    terms.clear();
    for (const auto& t : cfg["identity"]["terms"]) terms.push_back(t.get<long long>());
  }
  hoops::CsvWriter csv({"k", "terms", "residual"});
  for (long long J : terms) csv.add_row({double(k), double(J), hoops::pi_sum_residual(k, J)});
  csv.write((rc.out_dir / "identity.csv").string());
  return 0;
}

int task_closure(const RunContext& rc) {
  auto ops = hoops::OpSet::two_mode();
  std::string which = rc.config.value("basis", "quadratic6");
  std::vector<hoops::OperatorPolynomial> basis;
  if (which == "quadratic6")
    basis = {ops.c, ops.cd, ops.n, ops.d, ops.dd, ops.m};
  else if (which == "second6")
    basis = {ops.a, ops.b, hoops::multiply(ops.a, ops.b), hoops::multiply(ops.a, ops.bd), ops.n,
             ops.c};
  else if (which == "minimal")
    basis = {hoops::multiply(ops.n, ops.n), hoops::multiply(ops.n, ops.b),
             hoops::multiply(ops.n, ops.bd)};
  else
    throw ValidationError("closure: basis must be quadratic6|second6|minimal");
  bool allow_identity = rc.config.value("allow_identity", true);
  auto rep = hoops::check_closure(basis, allow_identity);
  json out{{"basis", which}, {"closed", rep.closed}, {"escapes", rep.escapes.size()}};
  write_text(rc.out_dir / "closure.json", out.dump(2));
  std::cout << "closed: " << (rep.closed ? "true" : "false") << "\n";
  return 0;
}

int steady_rows(const hoops::OptomechParams& p, hoops::CsvWriter& csv) {
  auto roots = hoops::photon_number_cubic(p);
  for (const auto& r : roots) {
    auto ph = hoops::coherent_phonons(p, p.Delta, r.nbar);
    csv.add_row({p.Delta / TWO_PI, std::norm(p.alpha), double(r.branch), r.nbar, ph.mbar,
                 r.bbar.real(), r.bbar.imag(), r.drive_phase, double(r.stable), r.residual});
  }
  return 0;
}

int task_steady(const RunContext& rc) {
  const auto& m = rc.config.at("model");
  std::string type = m.value("type", "optomech");
  if (type == "optomech") {
    hoops::CsvWriter csv({"Delta_Hz", "alpha2", "branch", "nbar", "mbar", "Re_b", "Im_b",
                          "drive_phase", "stable", "residual"});
    steady_rows(parse_optomech(m), csv);
    csv.write((rc.out_dir / "steady.csv").string());
  } else if (type == "quadratic") {
    auto q = parse_quadratic(m);
    auto s = hoops::quadratic_steady_state(q);
    hoops::CsvWriter csv({"alpha2", "nbar", "mbar", "abs_d", "residual", "nbar_saturation"});
    if (s)
      csv.add_row({std::norm(q.alpha), s->nbar, s->mbar, std::abs(s->dbar), s->residual,
                   1.0 / (1.0 + q.rho())});
    csv.write((rc.out_dir / "steady.csv").string());
    if (!s) {
      std::cerr << "quadratic steady state: no admissible root\n";
      return 3;
    }
  } else if (type == "cross_kerr") {
    require_keys(m, "model", {"type", "alpha", "beta", "lambda", "gamma", "xi"});
    hoops::CrossKerrSteadyParams q;
    q.alpha = need_num(m, "alpha", "model");
    q.beta = need_num(m, "beta", "model");
    q.lambda = need_num(m, "lambda", "model");
    q.gamma = need_num(m, "gamma", "model");
    q.xi = need_num(m, "xi", "model");
    auto s = hoops::cross_kerr_steady_state(q);
    hoops::CsvWriter csv({"xi", "nbar", "mbar", "abs_d", "bracket", "flagged", "residual"});
    csv.add_row({q.xi, s.state.nbar, s.state.mbar, std::abs(s.state.dbar), s.bracket,
                 double(s.unstable_denominator), s.state.residual});
    csv.write((rc.out_dir / "steady.csv").string());
  } else {
    throw ValidationError("steady: unsupported model type " + type);
  }
  return 0;
}

int task_spectrum(const RunContext& rc) {
  auto p = parse_optomech(rc.config.at("model"));
  auto grid = parse_grid(rc.config.at("grid")).build();
  int order = int(opt_num(rc.config, "order", 3));
  bool multiplicative = rc.config.value("multiplicative", false);

  auto roots = hoops::photon_number_cubic(p);
  const auto& r = roots.front();
  auto ph = hoops::coherent_phonons(p, p.Delta, r.nbar);

  hoops::SpectrumSeries spec;
  if (order == 4) {
    auto sys = hoops::build_linearized_optomech(p, r.nbar);
    spec = hoops::output_spectrum(sys, grid);
  } else {
    auto sys = hoops::build_second_order_optomech(p, r.nbar, ph.mbar, r.bbar, order);
    if (multiplicative) {
      auto silents = hoops::optomech_silents(p, r.nbar, ph.mbar);
      spec = hoops::multiplicative_spectrum(sys, silents, grid, 0.5, p.m_th + 0.5,
                                            p.gamma_total(), p.theta());
    } else {
      spec = hoops::output_spectrum(sys, grid);
    }
  }
  hoops::CsvWriter csv({"freq_Hz", "value"});
  for (std::size_t i = 0; i < spec.freqs.size(); ++i)
    csv.add_row({spec.freqs[i] / TWO_PI, spec.values[i]});
  csv.write((rc.out_dir / "spectrum.csv").string());
  return 0;
}

int task_sideband(const RunContext& rc) {
  auto p = parse_optomech(rc.config.at("model"));
  std::vector<double> nbars;
  if (rc.config.contains("nbar_axis"))
    nbars = axis_values(rc.config.at("nbar_axis"));
  else
    nbars = {1e2, 1e3, 1e4};
  hoops::CsvWriter csv({"nbar", "delta_eigen", "delta_hb", "regime"});
  for (double nb : nbars) {
    auto mph = hoops::coherent_phonons(p, p.Delta, nb);
    auto e = hoops::sideband_eigen(p, nb, mph.mbar);
    auto h = hoops::sideband_hb(p, nb);
    csv.add_row({nb, e.delta, h.delta, double(int(h.regime))});
  }
  csv.write((rc.out_dir / "sideband.csv").string());
  return 0;
}

int task_spring(const RunContext& rc) {
  auto p = parse_optomech(rc.config.at("model"));
  auto roots = hoops::photon_number_cubic(p);
  double nb = roots.front().nbar;
  auto mph = hoops::coherent_phonons(p, p.Delta, nb);
  auto dets = rc.config.contains("Delta_axis") ? axis_values(rc.config.at("Delta_axis"))
                                               : std::vector<double>{p.Delta / TWO_PI};
  hoops::CsvWriter csv(
      {"Delta_Hz", "w_Hz", "dOmega_unc", "dGamma_unc", "dOmega_corr", "dGamma_corr"});
  for (double dhz : dets) {
    double D = TWO_PI * dhz;
    auto u = hoops::spring_effect(p, p.Omega, D, nb, mph.mbar, false);
    auto c = hoops::spring_effect(p, p.Omega, D, nb, mph.mbar, true);
    csv.add_row({dhz, p.Omega / TWO_PI, u.dOmega, u.dGamma, c.dOmega, c.dGamma});
  }
  csv.write((rc.out_dir / "spring.csv").string());
  return 0;
}

int task_stability(const RunContext& rc) {
  auto p = parse_optomech(rc.config.at("model"));
  auto dets = axis_values(rc.config.at("Delta_axis"));
  for (auto& d : dets) d *= TWO_PI;
  auto pows = axis_values(rc.config.at("power_axis"));
  auto map = hoops::stability_map(p, dets, pows);
  hoops::CsvWriter csv({"Delta_Hz", "alpha2", "nbar", "maxRe_4", "maxRe_3", "maxRe_5", "phase"});
  for (std::size_t i = 0; i < dets.size(); ++i)
    for (std::size_t j = 0; j < pows.size(); ++j) {
      std::size_t idx = i * pows.size() + j;
      csv.add_row({dets[i] / TWO_PI, pows[j], map.nbar_cell[idx], map.max_re_lin4[idx],
                   map.max_re_ho3[idx], map.max_re_ho5[idx], double(int(map.phase[idx]))});
    }
  csv.write((rc.out_dir / "stability.csv").string());
  json summary{{"n_cr_extracted", map.n_cr_extracted}, {"n_cr_formula", map.n_cr_formula}};
  write_text(rc.out_dir / "stability_summary.json", summary.dump(2));
  return 0;
}

int task_simulate(const RunContext& rc) {
  auto p = parse_optomech(rc.config.at("model"));
  require_keys(rc.config.at("time"), "time", {"T", "dt"});
  double T = need_num(rc.config.at("time"), "T", "time");
  double dt = need_num(rc.config.at("time"), "dt", "time");
  bool noise = rc.config.value("noise", true);
  auto roots = hoops::photon_number_cubic(p);
  const auto& r = roots.front();
  auto sys = hoops::build_minimal_optomech(p, r.nbar, r.bbar);
  auto tr = hoops::integrate(sys, T, dt, rc.seed, noise);
  std::vector<std::string> hdr{"t"};
  for (const auto& b : sys.basis_labels) {
    hdr.push_back("Re_" + b);
    hdr.push_back("Im_" + b);
  }
  hoops::CsvWriter csv(hdr);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> row{tr.times[k]};
    for (Eigen::Index c = 0; c < tr.states[k].size(); ++c) {
      row.push_back(tr.states[k](c).real());
      row.push_back(tr.states[k](c).imag());
    }
    csv.add_row(row);
  }
  csv.write((rc.out_dir / "trajectory.csv").string());
  return 0;
}

int task_circuit(const RunContext& rc) {
  const auto& c = rc.config.at("circuit");
  require_keys(c, "circuit",
               {"tau", "mu", "kappa", "V0", "alpha_d", "omega_d", "order", "noise", "T", "dt"});
  hoops::CircuitParams p;
  p.tau = opt_num(c, "tau", 1.0);
  p.mu = opt_num(c, "mu", 1.0);
  p.kappa = need_num(c, "kappa", "circuit");
  p.V0 = opt_num(c, "V0", 0.1);
  p.alpha_d = opt_num(c, "alpha_d", 0.05);
  p.omega_d = opt_num(c, "omega_d", 1.0);
  p.order = int(opt_num(c, "order", 4));
  p.noise = opt_num(c, "noise", 0.0);
  double T = need_num(c, "T", "circuit"), dt = need_num(c, "dt", "circuit");
  auto wk = hoops::circuit_truncated(p, T, dt);
  auto wo = hoops::circuit_mean_field(p, T, dt);
  hoops::CsvWriter csv({"t", "u_truncated", "u_oracle"});
  for (std::size_t k = 0; k < wk.times.size(); ++k)
    csv.add_row({wk.times[k], wk.values[k], wo.values[k]});
  csv.write((rc.out_dir / "circuit.csv").string());
  return 0;
}

int task_kuramoto(const RunContext& rc) {
  const auto& c = rc.config.at("kuramoto");
  require_keys(c, "kuramoto", {"Omega", "psi", "x0", "p0", "form", "T", "dt"});
  hoops::KuramotoParams q;
  for (const auto& v : c.at("Omega")) q.Omega.push_back(v.get<double>());
  q.psi = need_num(c, "psi", "kuramoto");
  for (const auto& v : c.at("x0")) q.x0.push_back(v.get<double>());
  for (const auto& v : c.at("p0")) q.p0.push_back(v.get<double>());
  auto form = c.value("form", "cartesian") == "cartesian" ? hoops::KuramotoForm::cartesian
                                                          : hoops::KuramotoForm::action_angle;
  double T = need_num(c, "T", "kuramoto"), dt = need_num(c, "dt", "kuramoto");
  auto tr = hoops::kuramoto_integrate(q, form, T, dt);
  std::vector<std::string> hdr{"t"};
  for (int j = 0; j < q.N(); ++j) hdr.push_back("x" + std::to_string(j));
  for (int j = 0; j < q.N(); ++j) hdr.push_back("p" + std::to_string(j));
  hdr.push_back("H");
  hoops::CsvWriter csv(hdr);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> row{tr.times[k]};
    for (int j = 0; j < q.N(); ++j) row.push_back(tr.x[k](j));
    for (int j = 0; j < q.N(); ++j) row.push_back(tr.p[k](j));
    row.push_back(tr.energy[k]);
    csv.add_row(row);
  }
  csv.write((rc.out_dir / "kuramoto.csv").string());
  return 0;
}

/// Cartesian sweep over declared axes applied to the optomechanical steady
/// state; per-cell results appended with cell coordinates, resumable through
/// a completed-cell manifest.
int task_sweep(const RunContext& rc) {
  const auto& sw = rc.config.at("sweep");
  require_keys(sw, "sweep", {"axes", "task"});
  std::string sub = sw.value("task", "steady");
  std::vector<std::string> names;
  std::vector<std::vector<double>> axes;
  for (const auto& ax : sw.at("axes")) {
    names.push_back(ax.at("name").get<std::string>());
    axes.push_back(axis_values(ax));
  }
  std::size_t total = 1;
  for (auto& a : axes) total *= a.size();

  fs::path manifest = rc.out_dir / "sweep_manifest.txt";
  std::set<std::size_t> done;
  if (fs::exists(manifest)) {
    std::ifstream mf(manifest);
    std::size_t idx;
    while (mf >> idx) done.insert(idx);
  }

  struct Cell {
    std::vector<double> coords;
    std::vector<double> values;
    bool ok = true;
  };
  std::vector<Cell> cells(total);

  auto run_cell = [&](std::size_t idx) {
    Cell& cell = cells[idx];
    std::size_t rem = idx;
    cell.coords.resize(axes.size());
    json model = rc.config.at("model");
    for (std::size_t a = 0; a < axes.size(); ++a) {
      std::size_t i = rem % axes[a].size();
      rem /= axes[a].size();
      cell.coords[a] = axes[a][i];
      model[names[a]] = cell.coords[a];
    }
    try {
      auto p = parse_optomech(model);
      if (sub == "steady") {
        auto roots = hoops::photon_number_cubic(p);
        const auto& r = roots.front();
        auto ph = hoops::coherent_phonons(p, p.Delta, r.nbar);
        cell.values = {double(roots.size()), r.nbar, ph.mbar, double(r.stable)};
      } else if (sub == "sideband") {
        auto roots = hoops::photon_number_cubic(p);
        double nb = roots.front().nbar;
        auto mph = hoops::coherent_phonons(p, p.Delta, nb);
        cell.values = {nb, hoops::sideband_eigen(p, nb, mph.mbar).delta,
                       hoops::sideband_hb(p, nb).delta, 0.0};
      } else {
        throw ValidationError("sweep: task must be steady|sideband");
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      cell.ok = false;
      cell.values = {0, 0, 0, 0};
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      if (done.count(idx)) continue;
      run_cell(idx);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, rc.threads); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<std::string> hdr = names;
  if (sub == "steady") {
    hdr.insert(hdr.end(), {"branches", "nbar", "mbar", "stable"});
  } else {
    hdr.insert(hdr.end(), {"nbar", "delta_eigen", "delta_hb", "pad"});
  }
  hdr.push_back("cell_ok");
  hoops::CsvWriter csv(hdr);
  std::ofstream mf(manifest, std::ios::app);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto& cell = cells[idx];
    if (done.count(idx)) continue;
    std::vector<double> row = cell.coords;
    row.insert(row.end(), cell.values.begin(), cell.values.end());
    row.push_back(cell.ok ? 1.0 : 0.0);
    csv.add_row(row);
    mf << idx << "\n";
  }
  csv.write((rc.out_dir / "sweep.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"higher-order operator simulation toolkit"};
  std::string task, config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  app.add_option("task", task,
                 "closure|steady|spectrum|sideband|spring|stability|simulate|circuit|kuramoto|"
                 "identity|sweep")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--threads", threads, "worker pool size (sweeps)");
  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    RunContext rc;
    std::ifstream f(config_path);
    if (!f) throw ValidationError("cannot read config " + config_path);
    try {
      rc.config = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("config parse error: ") + e.what());
    }
    require_keys(rc.config, "config",
                 {"task", "seed", "model", "grid", "sweep", "identity", "basis", "allow_identity",
                  "order", "multiplicative", "nbar_axis", "Delta_axis", "power_axis", "time",
                  "noise", "circuit", "kuramoto", "output"});
    if (rc.config.contains("task") && rc.config.at("task").get<std::string>() != task)
      throw ValidationError("config task does not match command line task");
    rc.seed = seed_set ? seed : std::uint64_t(opt_num(rc.config, "seed", 0));
    rc.threads = threads;
    if (rc.threads <= 0) {
      if (const char* env = std::getenv("HOOPS_THREADS")) rc.threads = std::atoi(env);
      if (rc.threads <= 0) rc.threads = 1;
    }
    rc.out_dir = out_dir;
    fs::create_directories(rc.out_dir);
    write_text(rc.out_dir / "effective_config.json", echo_config(rc).dump(2) + "\n");

    int code = 0;
    if (task == "identity") code = task_identity(rc);
    else if (task == "closure") code = task_closure(rc);
    else if (task == "steady") code = task_steady(rc);
    else if (task == "spectrum") code = task_spectrum(rc);
    else if (task == "sideband") code = task_sideband(rc);
    else if (task == "spring") code = task_spring(rc);
    else if (task == "stability") code = task_stability(rc);
    else if (task == "simulate") code = task_simulate(rc);
    else if (task == "circuit") code = task_circuit(rc);
    else if (task == "kuramoto") code = task_kuramoto(rc);
    else if (task == "sweep") code = task_sweep(rc);
    else throw ValidationError("unknown task: " + task);

    if (code == 0) {
      json summary{{"task", task}, {"status", "ok"}, {"seed", rc.seed}};
      write_text(rc.out_dir / "summary.json", summary.dump(2) + "\n");
    }
    return code;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
