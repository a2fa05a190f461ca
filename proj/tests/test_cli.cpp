#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csim/cli.hpp"

using namespace csim;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("csim_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  return p.string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CSIM_BIN_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

const char* kWeakConfig = R"({
  "system": {
    "kind": "lotka_volterra",
    "b": [1.0, 1.0, 1.0],
    "a": [[1.0, 0.1, 0.1], [0.1, 1.0, 0.1], [0.1, 0.1, 1.0]]
  }
})";

const char* kCyclicConfig = R"({
  "system": {"kind": "may_leonard", "alpha": 1.5, "beta": 0.8}
})";

}  // namespace

TEST_CASE("config validation rejects malformed documents") {
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"system": {"kind": "nope"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"system": {"kind": "builtin_demo"}, "x": 1})"),
                  ConfigError);
  // b length vs a dimension mismatch must name the field.
  try {
    parse_config_text(R"({"system": {"kind": "lotka_volterra",
      "b": [1, 1], "a": [[1, 0.1, 0.1], [0.1, 1, 0.1], [0.1, 0.1, 1]]}})");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("system.a") != std::string::npos);
  }
  // Cyclic family constraints.
  CHECK_THROWS_AS(
      parse_config_text(R"({"system": {"kind": "may_leonard", "alpha": 0.9, "beta": 0.8}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(R"({"system": {"kind": "may_leonard", "alpha": 1.1, "beta": 0.5}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_config_text(
                      R"({"system": {"kind": "builtin_demo"}, "command": {"bogus": 1}})"),
                  ConfigError);
}

TEST_CASE("config echo round-trips") {
  RunConfig cfg = parse_config_text(kWeakConfig);
  cfg.m = 17;
  cfg.seed = 42;
  cfg.eta = 0.25;
  const RunConfig back = parse_config_text(config_to_json(cfg));
  CHECK(back.kind == cfg.kind);
  CHECK(back.b == cfg.b);
  CHECK(back.a == cfg.a);
  CHECK(back.m == 17);
  CHECK(back.seed == 42);
  CHECK(back.eta == 0.25);
  CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("build_system produces the requested models") {
  const RunConfig weak = parse_config_text(kWeakConfig);
  CHECK(build_system(weak)->dim() == 3);
  const RunConfig cyc = parse_config_text(kCyclicConfig);
  auto sys = build_system(cyc);
  CHECK(sys->growth(Vec{0.0, 1.0, 0.0})[0] == doctest::Approx(1.0 - 1.5));
  RunConfig demo;
  demo.kind = "builtin_demo";
  CHECK(build_system(demo)->dim() == 3);
}

TEST_CASE("check command exit codes separate the benchmarks") {
  TempDir tmp;
  const auto weak_cfg = write_file(tmp.path / "weak.json", kWeakConfig);
  const auto cyc_cfg = write_file(tmp.path / "cyc.json", kCyclicConfig);

  CHECK(run_cli("check --config " + weak_cfg + " --out " + tmp.path.string()) == 0);
  const json rep = read_json(tmp.path / "report.json");
  CHECK(rep["payload"]["holds"] == true);
  for (double m : rep["payload"]["growth_margins"])
    CHECK(m == doctest::Approx(0.8).epsilon(1e-9));

  CHECK(run_cli("check --config " + cyc_cfg + " --out " + tmp.path.string()) == 1);
  const json rep2 = read_json(tmp.path / "report.json");
  CHECK(rep2["payload"]["holds"] == false);
  for (double m : rep2["payload"]["growth_margins"])
    CHECK(m == doctest::Approx(-1.3).epsilon(1e-9));
}

TEST_CASE("config errors exit with code 2") {
  TempDir tmp;
  const auto bad = write_file(tmp.path / "bad.json", R"({"system": {"kind": "x"}})");
  CHECK(run_cli("check --config " + bad) == 2);
  CHECK(run_cli("check --config " + tmp.path.string() + "/missing.json") == 2);
}

TEST_CASE("rest-points command reports the full catalog") {
  TempDir tmp;
  const auto cfg = write_file(tmp.path / "weak.json", kWeakConfig);
  CHECK(run_cli("rest-points --config " + cfg + " --out " + tmp.path.string()) == 0);
  const json rep = read_json(tmp.path / "report.json");
  CHECK(rep["payload"]["count"] == 8);
  CHECK(rep["version"] == kToolVersion);
  CHECK(rep["command"] == "rest-points");
}

TEST_CASE("demo walkthrough matches the closed-form arithmetic") {
  TempDir tmp;
  CHECK(run_cli("demo may-leonard --alpha 1.4 --beta 0.9 --out " + tmp.path.string()) ==
        0);
  const json rep = read_json(tmp.path / "report.json");
  CHECK(rep["payload"]["smoothness_degree"] == 2);
  CHECK(rep["payload"]["hypothesis_holds"] == false);

  bool saw_axial = false, saw_interior = false;
  for (const auto& p : rep["payload"]["rest_points"]) {
    std::vector<double> re;
    for (const auto& ev : p["eigenvalues"]) re.push_back(ev["re"].get<double>());
    std::sort(re.begin(), re.end());
    const auto& face = p["face"];
    if (face.size() == 2) {  // axial point
      saw_axial = true;
      CHECK(re[0] == doctest::Approx(-1.0).epsilon(1e-9));
      CHECK(re[1] == doctest::Approx(-0.4).epsilon(1e-9));
      CHECK(re[2] == doctest::Approx(0.1).epsilon(1e-9));
    }
    if (face.empty() && p["location"][0].get<double>() > 0.2) {
      saw_interior = true;
      CHECK(re[1] == doctest::Approx(0.3 / 6.6).epsilon(1e-8));
    }
  }
  CHECK(saw_axial);
  CHECK(saw_interior);

  for (const auto& g : rep["payload"]["gap_route"]) CHECK(g["holds"] == true);

  // Invalid parameters funnel through the same validation.
  CHECK(run_cli("demo may-leonard --alpha 0.9 --beta 0.9") == 2);
}

TEST_CASE("reconstruction command emits a deterministic mesh") {
  TempDir tmp;
  const auto cfg = write_file(tmp.path / "weak.json", kWeakConfig);
  const std::string out1 = (tmp.path / "run1").string();
  const std::string out2 = (tmp.path / "run2").string();
  CHECK(run_cli("simplex --config " + cfg + " --m 6 --out " + out1) == 0);
  CHECK(run_cli("simplex --config " + cfg + " --m 6 --out " + out2) == 0);

  std::ifstream f1(out1 + "/sigma.csv"), f2(out2 + "/sigma.csv");
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(!s1.str().empty());
  CHECK(s1.str() == s2.str());

  std::string header;
  std::getline(s1, header);
  CHECK(header == "b1,b2,b3,r,x1,x2,x3,bracket_width");

  const json rep = read_json(fs::path(out1) / "report.json");
  CHECK(rep["payload"]["unordered_pairs"] == 0);
  CHECK(rep["payload"]["rays"] == 28);  // nodes of the m=6 mesh
}

TEST_CASE("permanence command verdicts") {
  TempDir tmp;
  const auto weak_cfg = write_file(tmp.path / "weak.json", kWeakConfig);
  CHECK(run_cli("permanence --config " + weak_cfg + " --starts 4 --out " +
                tmp.path.string()) == 0);
  const json rep = read_json(tmp.path / "report.json");
  CHECK(rep["payload"]["permanent"] == true);
}

TEST_CASE("certify command reflects the library verdict") {
  TempDir tmp;
  const auto weak_cfg = write_file(tmp.path / "weak.json", kWeakConfig);
  // Degree 2 (k=1) is not certifiable for the weak benchmark: exit 1.
  CHECK(run_cli("certify --config " + weak_cfg + " --k 1 --out " + tmp.path.string()) ==
        1);
  const json rep = read_json(tmp.path / "report.json");
  CHECK(rep["payload"]["hypothesis_holds"] == true);
  CHECK(rep["payload"]["verdict"] == "C1 certificate holds on samples");
  // Degree 1 (k=0) passes.
  CHECK(run_cli("certify --config " + weak_cfg + " --k 0 --out " + tmp.path.string()) ==
        0);
}
