// Exercises the installed command-line surface end to end: exit codes,
// output schemas, and byte-level reproducibility under a fixed seed.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rrjam/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_bin() {
  const char* bin = std::getenv("RRJAM_CLI_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "RRJAM_CLI_BIN must point at the rrjam binary");
  return bin;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "rrjam_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = cli_bin() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path small_config() {
  const fs::path path = work_dir() / "m2_small.json";
  std::ofstream out(path);
  out << R"({
    "topology": {"m": 2, "positions": [[0, 0], [80, 3]], "fading": "rayleigh"},
    "chain": {"lambda": 1.0, "gamma": 1.7},
    "jammer": {"p_R": 0.8, "p_J": 0.2, "tau_eta_sweep": [1.05, 1.25, 3]},
    "experiment": {"W": 300, "n_paths": 400, "seed": 5, "detector": "both"}
  })";
  return path;
}

fs::path naive_config() {
  const fs::path path = work_dir() / "m2_naive.json";
  std::ofstream out(path);
  out << R"({
    "topology": {"m": 2, "positions": [[0, 0], [80, 3]], "fading": "rayleigh"},
    "chain": {"lambda": 1.0, "gamma": 1.7},
    "jammer": {"naive_p_J": 1.0},
    "experiment": {"W": 300, "n_paths": 200, "seed": 5, "detector": "supervised"}
  })";
  return path;
}

fs::path bad_config() {
  const fs::path path = work_dir() / "bad_theta.json";
  std::ofstream out(path);
  out << R"({
    "topology": {"m": 2, "positions": [[0, 0], [80, 3]], "theta": 4.0124e-13},
    "jammer": {"p_R": 0.8, "p_J": 0.2}
  })";
  return path;
}

std::string slurp(const fs::path& p) { return rrjam::read_text_file(p.string()); }

}  // namespace

TEST_CASE("build exports chains and validation errors exit with code 1") {
  const fs::path out = work_dir() / "build_out";
  REQUIRE(run("build --config " + small_config().string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "chain_compliant.json"));
  CHECK(fs::exists(out / "chain_rrj.json"));
  const auto j = nlohmann::json::parse(slurp(out / "chain_compliant.json"));
  CHECK(j.at("states").size() == 4);
  CHECK(j.at("Q").size() == 4);

  CHECK(run("build --config " + bad_config().string() + " --out " + out.string()) == 1);
  CHECK(run("build --config /nonexistent.json --out " + out.string()) == 1);
}

TEST_CASE("detect writes a summary and flags the naive jammer as singular") {
  const fs::path out = work_dir() / "detect_out";
  REQUIRE(run("detect --config " + small_config().string() + " --out " + out.string()) == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "detect_summary.json"));
  REQUIRE(summary.contains("supervised"));
  REQUIRE(summary.contains("semi_supervised"));
  CHECK(!summary["supervised"]["singular"].get<bool>());
  CHECK(summary["supervised"].contains("eer"));
  CHECK(fs::exists(out / "roc.csv"));
  CHECK(fs::exists(out / "roc_semi_supervised.csv"));
  const std::string roc = slurp(out / "roc.csv");
  CHECK(roc.rfind("threshold,FAR,MDR\n", 0) == 0);

  const fs::path out_naive = work_dir() / "detect_naive";
  REQUIRE(run("detect --config " + naive_config().string() + " --out " + out_naive.string()) ==
          0);
  const auto naive = nlohmann::json::parse(slurp(out_naive / "detect_summary.json"));
  CHECK(naive["supervised"]["singular"].get<bool>());
  const std::string note = naive["supervised"]["note"].get<std::string>();
  CHECK(note.find("singular detection") != std::string::npos);
}

TEST_CASE("a compliant-mimicking jammer is undetectable") {
  const fs::path path = work_dir() / "mimic.json";
  {
    std::ofstream out(path);
    out << R"({
      "topology": {"m": 2, "positions": [[0, 0], [80, 3]], "fading": "rayleigh"},
      "chain": {"lambda": 1.0, "gamma": 1.7},
      "jammer": {"p_R": 1.0, "p_J": 0.0},
      "experiment": {"W": 500, "n_paths": 100, "seed": 5, "detector": "supervised"}
    })";
  }
  const fs::path out = work_dir() / "mimic_out";
  REQUIRE(run("detect --config " + path.string() + " --out " + out.string()) == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "detect_summary.json"));
  CHECK(summary["supervised"]["eer"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("detect summary schema is stable") {
  const fs::path out = work_dir() / "detect_schema";
  REQUIRE(run("detect --config " + small_config().string() + " --out " + out.string()) == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "detect_summary.json"));
  // golden key sets; extending the schema is fine, silently renaming is not
  for (const char* mode : {"supervised", "semi_supervised"}) {
    REQUIRE(summary.contains(mode));
    const auto& entry = summary[mode];
    for (const char* key : {"u", "singular", "eer", "eer_threshold", "moments", "roc_csv"})
      CHECK_MESSAGE(entry.contains(key), "missing key: ", key);
    for (const char* key : {"W", "mean0", "mean1", "var0", "var1"})
      CHECK_MESSAGE(entry["moments"].contains(key), "missing moments key: ", key);
  }
}

TEST_CASE("simulate, optimize, aggregate, pareto and oracles run end to end") {
  const std::string cfg = small_config().string();
  const fs::path out = work_dir() / "pipeline_out";
  REQUIRE(run("simulate --config " + cfg + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "roc_empirical.csv"));
  CHECK(fs::exists(out / "simulate_summary.json"));
  const auto sim = nlohmann::json::parse(slurp(out / "simulate_summary.json"));
  CHECK(sim["supervised"].contains("empirical_eer"));
  CHECK(sim["supervised"]["eer_gap"].get<double>() <= 0.1);

  REQUIRE(run("optimize --config " + cfg + " --out " + out.string()) == 0);
  const std::string strategy = slurp(out / "strategy.csv");
  CHECK(strategy.rfind("tau_eta,", 0) == 0);
  CHECK(strategy.find("\n") != std::string::npos);

  REQUIRE(run("aggregate --config " + cfg + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "roc_full.csv"));
  CHECK(fs::exists(out / "roc_intermediate.csv"));
  CHECK(fs::exists(out / "roc_simplified.csv"));
  const auto agg = nlohmann::json::parse(slurp(out / "aggregate_summary.json"));
  CHECK(agg["simplified"].contains("u_aggregated"));

  REQUIRE(run("pareto --config " + cfg + " --out " + out.string()) == 0);
  const std::string pareto = slurp(out / "pareto.csv");
  CHECK(pareto.rfind("p_R,p_J,eta,eer,model,on_frontier,distance\n", 0) == 0);
}

TEST_CASE("infeasible tau_eta exits nonzero") {
  const fs::path path = work_dir() / "infeasible.json";
  {
    std::ofstream out(path);
    out << R"({
      "topology": {"m": 2, "positions": [[0, 0], [80, 3]], "fading": "rayleigh"},
      "chain": {"lambda": 1.0, "gamma": 1.7},
      "jammer": {"p_R": 0.8, "p_J": 0.2, "tau_eta": 50.0},
      "experiment": {"W": 300, "n_paths": 100, "seed": 5}
    })";
  }
  const fs::path out = work_dir() / "infeasible_out";
  CHECK(run("optimize --config " + path.string() + " --out " + out.string()) == 1);
}

TEST_CASE("fixed seeds reproduce outputs byte for byte") {
  const std::string cfg = small_config().string();
  const fs::path a = work_dir() / "repro_a";
  const fs::path b = work_dir() / "repro_b";
  for (const auto& dir : {a, b}) {
    REQUIRE(run("simulate --config " + cfg + " --out " + dir.string() + " --threads 3") == 0);
    REQUIRE(run("detect --config " + cfg + " --out " + dir.string()) == 0);
  }
  for (const char* name :
       {"roc_empirical.csv", "roc_empirical_semi_supervised.csv", "simulate_summary.json",
        "roc.csv", "detect_summary.json"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
  // a different seed changes the sampled outputs
  const fs::path c = work_dir() / "repro_c";
  REQUIRE(run("simulate --config " + cfg + " --out " + c.string() + " --seed 99") == 0);
  CHECK(slurp(a / "roc_empirical.csv") != slurp(c / "roc_empirical.csv"));
}
