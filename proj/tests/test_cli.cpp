#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <spfl/csv.hpp>
#include <spfl/spectral.hpp>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  TempDir() {
    path = fs::temp_directory_path() /
           ("spfl_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SPFL_CLI_PATH) + " " + args + " >" +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

spfl::SpectralConfig paper_config() {
  spfl::SpectralConfig c;
  c.lambda_p0_nm = 1547.5;
  c.pump_filter = {1547.5, 0.9, spfl::FilterShape::rectangular};
  c.signal_filter = {1558.4, 0.7, spfl::FilterShape::rectangular};
  c.idler_filter = {1536.75, 1.3, spfl::FilterShape::rectangular};
  c.alpha_ps2 = 0.0435;
  c.xi_same_cps = 29.5;
  c.xi_diff_cps = 32.3;
  return c;
}

const std::string kConfigArg = std::string("--config ") + SPFL_FIXTURE_CONFIG;

}  // namespace

TEST_CASE("sweep: analytic curve peaks at the pi root") {
  TempDir tmp;
  const fs::path out = tmp.path / "sweep.csv";
  const fs::path log = tmp.path / "log.txt";
  const int code = run("sweep " + kConfigArg + " --out " + out.string() +
                           " --grid 4:20:0.1",
                       log);
  CHECK(code == 0);
  const spfl::SweepCurve curve = spfl::read_sweep_csv(out.string());
  REQUIRE(curve.points.size() == 161);
  double best_dl = 0.0, best = -1.0;
  for (const spfl::SweepPoint& p : curve.points) {
    if (p.ct_diff > best) {
      best = p.ct_diff;
      best_dl = p.delta_lambda_nm;
    }
  }
  CHECK(std::abs(best_dl - 10.73) < 0.1);  // grid-resolution proximity
}

TEST_CASE("sweep: fixed seed gives byte-identical monte carlo output") {
  TempDir tmp;
  const fs::path out1 = tmp.path / "a.csv";
  const fs::path out2 = tmp.path / "b.csv";
  const fs::path log = tmp.path / "log.txt";
  const std::string args = "sweep " + kConfigArg +
                           " --montecarlo --grid 10:11:0.5 --gates 100000 "
                           "--seed 42 --out ";
  CHECK(run(args + out1.string(), log) == 0);
  CHECK(run(args + out2.string(), log) == 0);
  CHECK(slurp(out1) == slurp(out2));
  const spfl::SweepCurve curve = spfl::read_sweep_csv(out1.string());
  CHECK(curve.has_singles);
  REQUIRE(curve.points.size() == 3);
}

TEST_CASE("sweep: bad inputs exit with code 1 or 2") {
  TempDir tmp;
  const fs::path out = tmp.path / "x.csv";
  const fs::path log = tmp.path / "log.txt";
  CHECK(run("sweep " + kConfigArg + " --out " + out.string() +
                " --grid 10:4:1",
            log) == 1);  // empty grid
  CHECK(run("sweep " + kConfigArg + " --out " + out.string() +
                " --grid 4:900:100",
            log) == 1);  // outside (0, lambda_p0/2)
  CHECK(run("sweep " + kConfigArg + " --out " + out.string() +
                " --grid banana",
            log) == 1);
  CHECK(run("sweep --config /nonexistent.config --out " + out.string(), log) ==
        2);
  CHECK(run("sweep " + kConfigArg + " --out /nonexistent_dir/y.csv", log) == 2);
  CHECK(run("sweep " + kConfigArg + " --out " + out.string() +
                " --no-such-flag",
            log) == 1);
}

TEST_CASE("fit: recovers the generator parameters through the CLI") {
  TempDir tmp;
  const spfl::SpectralConfig c = paper_config();
  spfl::SweepCurve data;
  for (double dl = 4.0; dl <= 20.0 + 1e-9; dl += 0.5) {
    spfl::SweepPoint p;
    p.delta_lambda_nm = dl;
    p.ct_same = spfl::fringe_model(c, dl, spfl::Branch::same);
    p.ct_diff = spfl::fringe_model(c, dl, spfl::Branch::diff);
    data.points.push_back(p);
  }
  const fs::path csv = tmp.path / "data.csv";
  spfl::write_sweep_csv(csv.string(), data);

  const fs::path report = tmp.path / "report.json";
  const fs::path log = tmp.path / "log.txt";
  const int code = run("fit --data " + csv.string() +
                           " --init 25,36,0.05 --report " + report.string(),
                       log);
  CHECK(code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(report));
  CHECK(std::abs(j["xi_same_cps"].get<double>() - 29.5) / 29.5 < 1e-6);
  CHECK(std::abs(j["xi_diff_cps"].get<double>() - 32.3) / 32.3 < 1e-6);
  CHECK(std::abs(j["alpha_ps2"].get<double>() - 0.0435) / 0.0435 < 1e-6);
  CHECK(j["converged"].get<bool>());
  const std::string stdout_text = slurp(log);
  CHECK(stdout_text.find("alpha_ps2") != std::string::npos);
}

TEST_CASE("fit: error paths use the documented exit codes") {
  TempDir tmp;
  const fs::path log = tmp.path / "log.txt";
  CHECK(run("fit --data " + (tmp.path / "missing.csv").string(), log) == 2);

  const fs::path bad = tmp.path / "bad.csv";
  {
    std::ofstream out(bad);
    out << "delta_lambda_nm,ct_same,ct_diff,err_same,err_diff\n"
        << "4,1,2,0,0\n"
        << "5,oops,2,0,0\n";
  }
  CHECK(run("fit --data " + bad.string() + " --report " +
                (tmp.path / "r.json").string(),
            log) == 1);
  CHECK(slurp(log).find("line 3") != std::string::npos);

  const fs::path degenerate = tmp.path / "degenerate.csv";
  {
    std::ofstream out(degenerate);
    out << "delta_lambda_nm,ct_same,ct_diff,err_same,err_diff\n"
        << "4,1,2,0,0\n"
        << "5,1,2,0,0\n";
  }
  CHECK(run("fit --data " + degenerate.string() + " --report " +
                (tmp.path / "r2.json").string(),
            log) == 3);
}

TEST_CASE("design: switching table through the CLI") {
  TempDir tmp;
  const fs::path out = tmp.path / "table.csv";
  const fs::path log = tmp.path / "log.txt";
  CHECK(run("design " + kConfigArg + " --n-max 2 --out " + out.string(),
            log) == 0);
  std::ifstream in(out);
  std::string header, row0;
  std::getline(in, header);
  std::getline(in, row0);
  CHECK(header == "n,delta_lambda_diff_nm,delta_lambda_same_nm");
  std::istringstream fields(row0);
  std::string n, diff, same;
  std::getline(fields, n, ',');
  std::getline(fields, diff, ',');
  std::getline(fields, same, ',');
  CHECK(n == "0");
  CHECK(std::abs(std::stod(diff) - 10.7292528284012) < 1e-9);
  CHECK(std::abs(std::stod(same) - 15.1300036246957) < 1e-9);
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);  // n = 1, 2 follow

  CHECK(run("design " + kConfigArg + " --n-max -1 --out " + out.string(),
            log) == 1);
}

TEST_CASE("power: writes a curve per requested pump power") {
  TempDir tmp;
  const fs::path out = tmp.path / "power.csv";
  const fs::path log = tmp.path / "log.txt";
  CHECK(run("power " + kConfigArg +
                " --powers 0.115,0.23 --gates 50000 --out " + out.string(),
            log) == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "power_mw,ct_same,ct_diff,err_same,err_diff");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}
