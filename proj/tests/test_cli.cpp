#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <suitaeq/cli.hpp>
#include <suitaeq/geometry.hpp>

using namespace suitaeq;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Capture {
  int code;
  std::string out;
};

Capture run_text(const std::string& command, const std::string& config,
                 cli::Flags flags = {.timings = false}) {
  std::ostringstream out, err;
  const int code = cli::run_text(command, config, flags, out, err);
  return {code, out.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Capture run_binary(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto stdout_path = dir / "suitaeq_cli_test.out";
  const std::string cmd =
      std::string(SUITAEQ_BINARY) + " " + args + " > " + stdout_path.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(stdout_path)};
}

const std::filesystem::path kConfigDir = SUITAEQ_CONFIG_DIR;

}  // namespace

TEST_CASE("normalization fills defaults and is idempotent") {
  const std::pair<std::string, std::string> minimal[] = {
      {"solve-dirichlet", "{}"},
      {"green", R"({"options":{"pole":[0.5,0]}})"},
      {"capacity", R"({"options":{"pole":[0.5,0]}})"},
      {"harmonic-measures", "{}"},
      {"check-equality", "{}"},
      {"search-equality", R"({"options":{"m":1,"q_max":2}})"},
      {"build-counterexample", R"({"options":{"m":1,"n":3,"M":2,"a":0.5}})"},
      {"certify-counterexample", R"({"options":{"m":1,"n":3,"M":2,"a":0.5}})"},
      {"annulus-check", "{}"},
      {"product-check", R"({"options":{"factors":[{}]}})"},
      {"dump-field", R"({"options":{"field":"measure"}})"},
  };
  for (const auto& [command, config] : minimal) {
    CAPTURE(command);
    const std::string normalized = cli::normalize_config(config, command);
    CHECK(cli::normalize_config(normalized, command) == normalized);
    const ordered_json cfg = ordered_json::parse(normalized);
    for (const char* key : {"domain", "weight", "jets", "solver", "seed", "tolerance", "options"})
      CHECK(cfg.contains(key));
    CHECK(cfg["domain"]["kind"] == "disk");
    CHECK(cfg["solver"]["degree"] == 24);
    CHECK(cfg["seed"] == 12345);
  }

  const ordered_json search =
      ordered_json::parse(cli::normalize_config(R"({"options":{"m":1,"q_max":2}})",
                                                "search-equality"));
  CHECK(search["tolerance"] == 1e-8);
  CHECK(search["options"]["trials"] == 100);

  // check-equality materializes unit amplitudes
  const ordered_json eq = ordered_json::parse(cli::normalize_config(
      R"({"jets":{"points":[[0.3,0]],"orders":[1]}})", "check-equality"));
  CHECK(eq["jets"]["amplitudes"] == ordered_json::parse("[[1.0,0.0]]"));
}

TEST_CASE("schema violations are rejected") {
  auto reject = [](const std::string& config, const std::string& command) {
    CAPTURE(config);
    CHECK_THROWS_AS(cli::normalize_config(config, command), ConfigError);
  };
  reject(R"({"junk":1})", "capacity");
  reject(R"({"options":{"pole":[0,0],"junk":1}})", "capacity");
  reject(R"({"options":{}})", "capacity");  // pole required
  reject(R"({"options":{"m":1,"n":3,"M":2,"a":0.5,"samples":9}})", "build-counterexample");
  reject(R"({"options":{"field":"measure","pole":[0,0]}})", "dump-field");
  reject(R"({"options":{"field":"green"}})", "dump-field");
  reject(R"({"options":{"data":{"constant":1,"indicator":0}}})", "solve-dirichlet");
  reject(R"({"weight":{"u":{"zero":true,"measures":[1]}}})", "capacity");
  reject(R"({"weight":{"profile":{"kind":"constant","terms":[]}}})", "capacity");
  reject(R"({"domain":{"kind":"annulus","R":0.5}})", "capacity");
  reject(R"({"domain":{"kind":"mystery"}})", "capacity");
  reject(R"({"jets":{"points":[[0,0]],"orders":[]}})", "check-equality");
  reject(R"({"jets":{"points":[[0,0]],"orders":[0],"weights":[1,2]}})", "check-equality");
  reject(R"({"seed":-4})", "capacity");
  reject(R"({"tolerance":0})", "capacity");
  reject(R"({"options":{"pole":[1]}})", "capacity");
  reject(R"({"options":{"factors":[]}})", "product-check");
  reject("[1,2]", "capacity");
  reject("not json", "capacity");
}

TEST_CASE("check-equality on the annulus: capable, exit 0") {
  const auto res = run_text("check-equality", slurp(kConfigDir / "check-equality.json"));
  CHECK(res.code == cli::kExitOk);
  const ordered_json report = ordered_json::parse(res.out);
  CHECK(report["command"] == "check-equality");
  CHECK(report["outputs"]["verdict"] == "EQUALITY_CAPABLE");
  CHECK(std::abs(report["outputs"]["deltas"][0]["delta"].get<double>() - 1.0) < 1e-8);
  CHECK(report["outputs"]["bergman"].get<double>() > 0.0);
  CHECK(!report.contains("timings"));
}

TEST_CASE("check-equality impossible by count: exit 2") {
  const std::string config = R"({
    "domain": {"kind": "circular", "outer": {"c": [0,0], "r": 1.0},
               "holes": [{"c": [0.45, 0.1], "r": 0.17}, {"c": [-0.35, -0.3], "r": 0.13}]},
    "jets": {"points": [[0.1, 0.25]], "orders": [0]}
  })";
  const auto res = run_text("check-equality", config);
  CHECK(res.code == cli::kExitNegative);
  const ordered_json report = ordered_json::parse(res.out);
  CHECK(report["outputs"]["verdict"] == "IMPOSSIBLE_BY_COUNT");
}

TEST_CASE("annulus-check exit codes track the criterion") {
  const auto good = run_text("annulus-check", slurp(kConfigDir / "annulus-check.json"));
  CHECK(good.code == cli::kExitOk);
  CHECK(ordered_json::parse(good.out)["outputs"]["satisfied"] == true);

  const std::string off = R"({
    "domain": {"kind": "annulus", "R": 4.0},
    "jets": {"points": [[1.7, 0.0]], "orders": [1]}
  })";
  const auto bad = run_text("annulus-check", off);
  CHECK(bad.code == cli::kExitNegative);
  const ordered_json report = ordered_json::parse(bad.out);
  CHECK(report["outputs"]["satisfied"] == false);
  CHECK(report["outputs"]["log_residual"].get<double>() ==
        doctest::Approx(0.3250378589955498).epsilon(1e-10));
}

TEST_CASE("flagged solves exit 3") {
  const std::string config = R"({
    "domain": {"kind": "disk"},
    "solver": {"tolerance": 1e-16},
    "options": {"data": {"constant": 1.0}}
  })";
  const auto res = run_text("solve-dirichlet", config);
  CHECK(res.code == cli::kExitNumeric);
  CHECK(ordered_json::parse(res.out)["outputs"]["flagged"] == true);
}

TEST_CASE("config problems exit 4 without a report") {
  CHECK(run_text("capacity", "{ not json").code == cli::kExitConfig);
  CHECK(run_text("no-such-command", "{}").code == cli::kExitConfig);
  CHECK(run_text("capacity", R"({"options":{"pole":[5.0,0]}})").code == cli::kExitConfig);
  const std::string outside = R"({
    "domain": {"kind": "disk"},
    "options": {"pole": [0.5, 0], "probes": [[2.0, 0.0]]}
  })";
  CHECK(run_text("green", outside).code == cli::kExitConfig);
  CHECK(run_text("green", outside).out.empty());
}

TEST_CASE("reports are deterministic and flags land in the echo") {
  const std::string config = slurp(kConfigDir / "certify-counterexample.json");
  const auto a = run_text("certify-counterexample", config);
  const auto b = run_text("certify-counterexample", config);
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out == b.out);

  cli::Flags flags;
  flags.timings = true;
  const auto timed = run_text("certify-counterexample", config, flags);
  CHECK(ordered_json::parse(timed.out).contains("timings"));

  flags = {.seed = 99, .tolerance = 1e-7, .degree = 30, .timings = false};
  const auto overridden = run_text("certify-counterexample", config, flags);
  const ordered_json echo = ordered_json::parse(overridden.out)["config"];
  CHECK(echo["seed"] == 99);
  CHECK(echo["tolerance"] == 1e-7);
  CHECK(echo["solver"]["degree"] == 30);
  CHECK(overridden.out != a.out);
}

TEST_CASE("echoed configs re-normalize to themselves") {
  for (const char* name : {"green.json", "product-check.json", "search-equality.json"}) {
    CAPTURE(name);
    const std::string command = std::filesystem::path(name).stem().string();
    const auto res = run_text(command, slurp(kConfigDir / name));
    REQUIRE(res.code == cli::kExitOk);
    const ordered_json echo = ordered_json::parse(res.out)["config"];
    CHECK(cli::normalize_config(echo.dump(), command) == echo.dump(2));
  }
}

TEST_CASE("every shipped example runs through the real binary") {
  const auto csv_path = std::filesystem::temp_directory_path() / "suitaeq_cli_field.csv";
  for (const auto& entry : std::filesystem::directory_iterator(kConfigDir)) {
    if (entry.path().extension() != ".json") continue;
    const std::string command = entry.path().stem().string();
    CAPTURE(command);
    std::string args = command + " --config " + entry.path().string() + " --no-timings";
    if (command == "dump-field") args += " --out " + csv_path.string();
    const auto res = run_binary(args);
    CHECK(res.code == cli::kExitOk);
    CHECK(ordered_json::parse(res.out)["command"] == command);
  }

  const std::string csv = slurp(csv_path);
  CHECK(csv.starts_with("x,y,value\n"));
  CHECK(csv.find("nan") != std::string::npos);  // corners lie outside the annulus
}

TEST_CASE("the real binary is byte-stable run to run") {
  const std::string args = "search-equality --config " +
                           (kConfigDir / "search-equality.json").string() + " --no-timings";
  const auto a = run_binary(args);
  const auto b = run_binary(args);
  CHECK(a.code == cli::kExitOk);
  CHECK(!a.out.empty());
  CHECK(a.out == b.out);

  const ordered_json report = ordered_json::parse(a.out);
  CHECK(report["outputs"]["status"] == "FOUND");
  CHECK(std::abs(std::abs(Complex(report["outputs"]["points"][0][0].get<double>(),
                                  report["outputs"]["points"][0][1].get<double>())) -
                 2.0) < 1e-6);
}
