#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kDir = fs::temp_directory_path() / "budgetreg_cli_test";

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string("\"") + BUDGETREG_CLI + "\" " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > \"" + (kDir / stdout_file).string() + "\"";
  cmd += " 2> \"" + (kDir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string p(const std::string& name) { return "\"" + (kDir / name).string() + "\""; }

struct Fixture {
  Fixture() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }
  ~Fixture() { fs::remove_all(kDir); }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "generate is deterministic and validates alpha") {
  REQUIRE(run("generate --dim 10 --alpha -1 --regime l2 --m 200 --seed 3 --out " + p("a.csv")) == 0);
  REQUIRE(run("generate --dim 10 --alpha -1 --regime l2 --m 200 --seed 3 --out " + p("b.csv")) == 0);
  CHECK(slurp(kDir / "a.csv") == slurp(kDir / "b.csv"));
  const json meta = json::parse(slurp(kDir / "a.csv.json"));
  CHECK(meta.at("dim") == 10);
  CHECK(meta.at("w_star").size() == 10);
  CHECK(run("generate --dim 10 --alpha 0.5 --regime l2 --m 20 --out " + p("c.csv")) != 0);
  CHECK_FALSE(fs::exists(kDir / "c.csv"));
}

TEST_CASE_FIXTURE(Fixture, "ratios") {
  REQUIRE(run("generate --dim 20 --alpha 0 --regime linf --m 2000 --seed 1 --out " + p("d.csv")) == 0);
  REQUIRE(run("ratios --data " + p("d.csv") + " --regime linf", "r.json") == 0);
  const json r = json::parse(slurp(kDir / "r.json"));
  CHECK(r.at("d") == 20);
  CHECK(r.at("rho_lasso").get<double>() > 0.9);
  CHECK(r.at("rho_ridge").get<double>() > 0.9);
}

TEST_CASE_FIXTURE(Fixture, "train") {
  REQUIRE(run("generate --dim 8 --alpha -1 --regime l2 --m 500 --seed 2 --out " + p("t.csv")) == 0);
  const std::string base = "train --algo ddaerr --data " + p("t.csv") + " --test " + p("t.csv") +
                           " --k 3 --b 3 --eta 0.1 --seed 9";
  REQUIRE(run(base + " --out-model " + p("m1.json"), "out.json") == 0);
  REQUIRE(run(base + " --out-model " + p("m2.json")) == 0);
  CHECK(slurp(kDir / "m1.json") == slurp(kDir / "m2.json"));
  const json report = json::parse(slurp(kDir / "out.json"));
  CHECK(report.at("attributes_observed") == 500 * 4);
  CHECK(report.contains("test_relative_loss"));

  CHECK(run("train --algo ddaerr --data " + p("t.csv") + " --k 0 --b 3 --eta 0.1 --out-model " +
            p("m3.json")) != 0);
  CHECK(run("train --algo ddaelr --data " + p("t.csv") + " --k 2 --b 3 --eta 0.1 --out-model " +
            p("m4.json")) != 0);
  CHECK(slurp(kDir / "stderr.txt").find("linf") != std::string::npos);
  CHECK(run("train --algo aerr --data " + p("t.csv") + " --k 2 --b 3 --out-model " +
            p("m5.json")) != 0);
  CHECK(run("train --algo aerr --data " + p("t.csv") + " --k 2 --b 3 --eta-auto --out-model " +
            p("m6.json")) == 0);
}

TEST_CASE_FIXTURE(Fixture, "experiment") {
  std::ofstream(kDir / "cfg.json") << R"({"algorithms": ["aerr", "ddaerr"], "dim": 5,
    "alpha": -1, "m_total": 200, "k": 2, "repeats": 2, "prefixes": [40, 80],
    "eta_mode": "theory", "seed": 3})";
  REQUIRE(run("experiment --config " + p("cfg.json") + " --out-dir " + p("out")) == 0);
  std::ifstream records(kDir / "out" / "records.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(records, line)) ++lines;
  CHECK(lines == 1 + 2 * 2 * 2);
  CHECK(fs::exists(kDir / "out" / "curve_ddaerr.csv"));
  CHECK(fs::exists(kDir / "out" / "summary.json"));

  CHECK(run("experiment --config " + p("cfg.json") + " --out-dir " + p("out")) != 0);
  CHECK(run("experiment --config " + p("cfg.json") + " --out-dir " + p("out") + " --force") == 0);

  std::ofstream(kDir / "bad.json") << R"({"algorithms": ["aerr"], "prefixes": [5], "k": 0})";
  CHECK(run("experiment --config " + p("bad.json") + " --out-dir " + p("bad")) != 0);
  CHECK(slurp(kDir / "stderr.txt").find("k:") != std::string::npos);
}
