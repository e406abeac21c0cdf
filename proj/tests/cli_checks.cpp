// End-to-end checks of the hoops command-line tool.  Usage: cli_checks <hoops-binary>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hoops/observables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
  if (!ok) ++failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int run(const std::string& bin, const std::string& task, const json& cfg, const fs::path& out,
        const std::string& extra = "") {
  fs::path cfg_path = out / "config.json";
  fs::create_directories(out);
  std::ofstream(cfg_path) << cfg.dump(2);
  std::string cmd = bin + " " + task + " --config " + cfg_path.string() + " --out " +
                    out.string() + " " + extra + " > " + (out / "stdout.txt").string() + " 2> " +
                    (out / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

json optomech_model() {
  return json{{"type", "optomech"}, {"Omega_Hz", 1.0e6}, {"kappa_Hz", 5.0e4},
              {"Gamma_Hz", 10.0},   {"g0_Hz", 100.0},    {"Delta_Hz", 0.0},
              {"alpha", 0.0}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_checks <hoops-binary>\n";
    return 2;
  }
  std::string bin = argv[1];
  fs::path root = fs::temp_directory_path() / "hoops_cli_checks";
  fs::remove_all(root);

  {
    json cfg{{"task", "identity"}, {"identity", {{"k", 1}, {"terms", {1000000}}}}};
    int rc = run(bin, "identity", cfg, root / "id");
    auto csv = slurp(root / "id" / "identity.csv");
    double residual = 1.0;
    auto pos = csv.rfind(',');
    if (pos != std::string::npos) residual = std::stod(csv.substr(pos + 1));
    check(rc == 0 && residual < 1e-5, "identity task emits a converged residual");
  }
  {
    json cfg{{"task", "closure"}, {"basis", "quadratic6"}, {"allow_identity", true}};
    int rc = run(bin, "closure", cfg, root / "cl");
    auto text = slurp(root / "cl" / "stdout.txt");
    check(rc == 0 && text.find("closed: true") != std::string::npos,
          "closure task reports the six-dimensional quadratic basis closed");
  }
  {
    json cfg{{"task", "steady"}, {"model", optomech_model()}};
    int rc = run(bin, "steady", cfg, root / "st");
    auto csv = slurp(root / "st" / "steady.csv");
    check(rc == 0 && csv.find("\n0,0,0,0,") != std::string::npos,
          "undriven steady state lands on the zero branch");
  }
  {
    auto model = optomech_model();
    model["alpha"] = 200.0;
    json cfg{{"task", "steady"}, {"model", model}, {"seed", 7}};
    int rc1 = run(bin, "steady", cfg, root / "d1");
    int rc2 = run(bin, "steady", cfg, root / "d2");
    check(rc1 == 0 && rc2 == 0 &&
              slurp(root / "d1" / "steady.csv") == slurp(root / "d2" / "steady.csv"),
          "identical config and seed give byte-identical CSV");
  }
  {
    json cfg{{"task", "steady"}, {"model", optomech_model()}, {"bogus_key", 1}};
    int rc = run(bin, "steady", cfg, root / "bad");
    check(rc == 2, "unknown config key rejected with exit code 2");
  }
  {
    auto model = optomech_model();
    model["kappa_Hz"] = -1.0;
    json cfg{{"task", "steady"}, {"model", model}};
    int rc = run(bin, "steady", cfg, root / "neg");
    check(rc == 3, "invalid physical rates fail numerically with exit code 3");
  }
  {
    // 1x1 sweep equals the single run
    auto model = optomech_model();
    model["alpha"] = 150.0;
    json cfg{{"task", "sweep"},
             {"model", model},
             {"sweep",
              {{"task", "steady"},
               {"axes", json::array({{{"name", "Delta_Hz"}, {"start", 0.0}, {"stop", 0.0},
                                      {"points", 1}}})}}}};
    int rc = run(bin, "sweep", cfg, root / "sw1");
    auto csv = slurp(root / "sw1" / "sweep.csv");
    int lines = 0;
    for (char c : csv)
      if (c == '\n') ++lines;
    check(rc == 0 && lines == 2, "degenerate sweep emits exactly one cell");
  }
  {
    // sideband sweep reproduces the unimodal curve with the optimum inside
    hoops::OptomechParams p;
    p.Omega = 2.0 * M_PI * 1e6;
    p.kappa = 2.0 * M_PI * 5e4;
    p.Gamma = 2.0 * M_PI * 10.0;
    p.g0 = 2.0 * M_PI * 100.0;
    auto opt = hoops::sideband_optimum(p);
    json cfg{{"task", "sideband"},
             {"model", optomech_model()},
             {"nbar_axis",
              {{"name", "nbar"}, {"start", opt.nbar_max * 1e-2}, {"stop", opt.nbar_max * 1e2},
               {"points", 41}, {"scale", "log"}}}};
    int rc = run(bin, "sideband", cfg, root / "sb");
    auto csv = slurp(root / "sb" / "sideband.csv");
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    std::vector<double> nb, dhb;
    while (std::getline(is, line)) {
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double a, b, c, d;
      ls >> a >> b >> c >> d;
      nb.push_back(a);
      dhb.push_back(c);
    }
    std::size_t kmax = std::max_element(dhb.begin(), dhb.end()) - dhb.begin();
    bool unimodal = kmax > 0 && kmax + 1 < dhb.size();
    for (std::size_t i = 0; i + 1 <= kmax && unimodal; ++i)
      if (dhb[i] >= dhb[i + 1]) unimodal = false;
    for (std::size_t i = kmax; i + 1 < dhb.size() && unimodal; ++i)
      if (dhb[i + 1] >= dhb[i]) unimodal = false;
    double cell_ratio = nb[1] / nb[0];
    bool near = nb[kmax] / opt.nbar_max < cell_ratio * 1.01 &&
                opt.nbar_max / nb[kmax] < cell_ratio * 1.01;
    check(rc == 0 && unimodal && near,
          "sideband sweep is unimodal with the maximum at the closed-form optimum");
  }
  {
    // effective config is echoed with angular frequencies and is re-runnable
    json cfg{{"task", "steady"}, {"model", optomech_model()}};
    int rc = run(bin, "steady", cfg, root / "echo");
    auto echo = json::parse(slurp(root / "echo" / "effective_config.json"));
    bool has_angular = echo.contains("model_angular") &&
                       echo["model_angular"].contains("Omega_rad_s");
    std::ofstream(root / "echo2.json") << echo.dump();
    // strip echo-only keys for the rerun
    echo.erase("model_angular");
    echo.erase("effective_seed");
    fs::create_directories(root / "rerun");
    std::ofstream(root / "rerun" / "config.json") << echo.dump();
    std::string cmd = bin + " steady --config " + (root / "rerun" / "config.json").string() +
                      " --out " + (root / "rerun").string() + " > /dev/null 2>&1";
    int rc2 = WEXITSTATUS(std::system(cmd.c_str()));
    check(rc == 0 && has_angular && rc2 == 0,
          "effective config records angular values and re-runs cleanly");
  }

  std::cout << (failures == 0 ? "all cli checks passed\n" : "cli checks FAILED\n");
  return failures == 0 ? 0 : 1;
}
