#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pshoot/cli.hpp"
#include "pshoot/config.hpp"
#include "pshoot/errors.hpp"
#include "pshoot/sweep.hpp"

namespace fs = std::filesystem;
using pshoot::cli_run;
using pshoot::ProblemConfig;

namespace {

fs::path temp_root() {
  auto dir = fs::temp_directory_path() / "pshoot_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path path = temp_root() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config file parsing and validation") {
  const auto path = write_config("good.cfg",
                                 "# problem\n"
                                 "p = 2\n"
                                 "q = 50\n"
                                 "R1 = 0\n"
                                 "R2 = 1\n"
                                 "N = 1\n"
                                 "nonlinearity = prototype\n"
                                 "\n"
                                 "tol_rel = 1e-10\n"
                                 "scan_points = 128\n");
  const ProblemConfig cfg = pshoot::parse_config_file(path.string());
  CHECK(cfg.p == 2.0);
  CHECK(cfg.q == 50.0);
  CHECK(cfg.scan_points == 128);
  CHECK_NOTHROW(cfg.validate(true));

  SUBCASE("unknown key names the line") {
    const auto bad = write_config("bad_key.cfg", "p = 2\nnope = 1\n");
    try {
      pshoot::parse_config_file(bad.string());
      CHECK(false);
    } catch (const pshoot::ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("nope") != std::string::npos);
      CHECK(msg.find("line 2") != std::string::npos);
    }
  }

  SUBCASE("malformed line is rejected") {
    const auto bad = write_config("bad_line.cfg", "p 2\n");
    CHECK_THROWS_AS(pshoot::parse_config_file(bad.string()),
                    pshoot::ConfigError);
  }

  SUBCASE("bad value is rejected with the key") {
    const auto bad = write_config("bad_val.cfg", "p = two\n");
    CHECK_THROWS_AS(pshoot::parse_config_file(bad.string()),
                    pshoot::ConfigError);
  }

  SUBCASE("domain validation") {
    ProblemConfig c = cfg;
    c.R2 = 0.0;
    CHECK_THROWS_AS(c.validate(true), pshoot::ConfigError);
    c = cfg;
    c.q = 1.0;
    CHECK_THROWS_AS(c.validate(true), pshoot::ConfigError);
    CHECK_NOTHROW(c.validate(false));  // eigen runs do not need q
    c = cfg;
    c.scan_points = 32;
    CHECK_THROWS_AS(c.validate(true), pshoot::ConfigError);
  }
}

TEST_CASE("cli exit codes") {
  const auto cfg = write_config("solve.cfg",
                                "p = 2\nq = 50\nR1 = 0\nR2 = 1\nN = 1\n");
  const auto out = temp_root() / "solve_out";

  SUBCASE("solve q = 50 succeeds with two solution files") {
    const int rc = cli_run({"--threads", "2", "solve", "--config",
                            cfg.string(), "--jmax", "2", "--scan", "128",
                            "--out", out.string()});
    CHECK(rc == 0);
    CHECK(fs::exists(out / "solutions.csv"));
    CHECK(fs::exists(out / "solution_j1_unique.csv"));
    CHECK(fs::exists(out / "solution_j2_unique.csv"));
    const std::string table = slurp(out / "solutions.csv");
    CHECK(table.find("# pshoot") != std::string::npos);
    CHECK(table.find("# config:") != std::string::npos);
    CHECK(table.find("j,branch,d,u0,uR2,boundary_residual,min_u") !=
          std::string::npos);
  }

  SUBCASE("below-onset solve with --require-solution exits 4") {
    const int rc = cli_run({"solve", "--config", cfg.string(), "--q", "10",
                            "--jmax", "1", "--scan", "96", "--out",
                            (temp_root() / "empty_out").string(),
                            "--require-solution"});
    CHECK(rc == 4);
  }

  SUBCASE("malformed domain exits 2") {
    const int rc = cli_run({"solve", "--config", cfg.string(), "--R2", "0",
                            "--jmax", "1", "--out", out.string()});
    CHECK(rc == 2);
  }

  SUBCASE("unknown plugin exits 2") {
    const int rc = cli_run({"solve", "--config", cfg.string(),
                            "--nonlinearity", "plugin:missing", "--jmax", "1",
                            "--out", out.string()});
    CHECK(rc == 2);
  }

  SUBCASE("usage errors exit 2") {
    CHECK(cli_run({"sweep", "--param", "q"}) == 2);  // missing required flags
    CHECK(cli_run({}) == 2);
    CHECK(cli_run({"frobnicate"}) == 2);
  }
}

TEST_CASE("shoot emits the profile csv with config echo") {
  const auto cfg = write_config("shoot.cfg",
                                "p = 2\nq = 14\nR1 = 0\nR2 = 1\nN = 1\n");
  const auto out = temp_root() / "shot.csv";
  const int rc = cli_run({"shoot", "--config", cfg.string(), "--d", "0.5",
                          "--out", out.string()});
  CHECK(rc == 0);
  const std::string body = slurp(out);
  CHECK(body.find("r,u,v,theta,rho2,H\n") != std::string::npos);
  CHECK(body.find("# config: p=2 q=14") != std::string::npos);
  CHECK(body.find("d=0.5") != std::string::npos);

  // byte-identical across runs
  const auto out2 = temp_root() / "shot2.csv";
  CHECK(cli_run({"shoot", "--config", cfg.string(), "--d", "0.5", "--out",
                 out2.string()}) == 0);
  CHECK(slurp(out2) == body);
}

TEST_CASE("ptrig table emission") {
  const auto out = temp_root() / "trig.csv";
  const int rc =
      cli_run({"ptrig", "--p", "3", "--table", "64", "--out", out.string()});
  CHECK(rc == 0);
  std::ifstream in(out);
  std::string line;
  int rows = 0;
  bool header = false;
  double worst = 0.0;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!header) {
      CHECK(line == "theta,cos_p,sin_p,identity_residual");
      header = true;
      continue;
    }
    ++rows;
    const auto last = line.rfind(',');
    worst = std::max(worst, std::stod(line.substr(last + 1)));
  }
  CHECK(rows == 64);
  CHECK(worst <= 1e-10);

  CHECK(cli_run({"ptrig", "--p", "0.5"}) == 2);  // p <= 1 rejected
}

TEST_CASE("eigen subcommand emits the spectrum") {
  const auto out = temp_root() / "eigen.csv";
  const int rc = cli_run({"eigen", "--p", "2", "--R1", "0", "--R2", "1",
                          "--N", "1", "--kmax", "3", "--out", out.string()});
  CHECK(rc == 0);
  const std::string body = slurp(out);
  CHECK(body.find("k,lambda,theta_end,residual\n") != std::string::npos);
  // three data rows
  int rows = 0;
  std::istringstream ss(body);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'k') ++rows;
  CHECK(rows == 3);
}

TEST_CASE("sweep subcommand writes branches and svg") {
  const auto cfg = write_config("sweep.cfg",
                                "p = 2\nq = 50\nR1 = 0\nR2 = 1\nN = 1\n"
                                "scan_points = 96\n");
  const auto out = temp_root() / "sweep_out";
  const int rc = cli_run({"--threads", "2", "sweep", "--config", cfg.string(),
                          "--param", "q", "--from", "49", "--to", "50",
                          "--step", "1", "--jmax", "1", "--out", out.string(),
                          "--svg"});
  CHECK(rc == 0);
  CHECK(fs::exists(out / "branches.csv"));
  CHECK(fs::exists(out / "diagram.svg"));
  const auto points = pshoot::parse_branches_csv(out / "branches.csv");
  CHECK(points.size() == 2);
}

TEST_CASE("shoot accepts a direct u0 for fold shots") {
  const auto out = temp_root() / "fold_shot.csv";
  const int rc = cli_run({"shoot", "--p", "1.5", "--q", "3", "--R1", "0",
                          "--R2", "8", "--N", "1", "--u0", "1e-12", "--out",
                          out.string()});
  CHECK(rc == 0);
  const std::string body = slurp(out);
  CHECK(body.find("u0=9.9999999999999998e-13") != std::string::npos);
}

TEST_CASE("version flag") {
  CHECK(cli_run({"--version"}) == 0);
}

TEST_CASE("flags override config values") {
  const auto cfg = write_config("override.cfg",
                                "p = 2\nq = 10\nR1 = 0\nR2 = 1\nN = 1\n");
  const auto out = temp_root() / "override_out";
  // q = 50 on the command line wins over q = 10 in the file
  const int rc = cli_run({"solve", "--config", cfg.string(), "--q", "50",
                          "--jmax", "1", "--scan", "96", "--out",
                          out.string(), "--require-solution"});
  CHECK(rc == 0);
}
