#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "capsim/config.hpp"
#include "capsim/errors.hpp"
#include "capsim/pipeline.hpp"

using namespace capsim;
namespace fs = std::filesystem;

#ifndef CAPSIM_BIN
#define CAPSIM_BIN "capsim"
#endif

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "capsim-pipeline-test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// small but complete configuration for fast end-to-end runs; block sizes keep
// every class above the fold count after discards at t_c = 5
ExperimentConfig mini_config() {
  ExperimentConfig config = ExperimentConfig::defaults();
  config.subjects = {{"s1", 1.0, 1.0, 0}};
  config.schedule = {
      {ActivityLabel::Walk, 100.0},      {ActivityLabel::Run, 240.0},
      {ActivityLabel::StairsUp, 210.0},  {ActivityLabel::StairsDown, 160.0},
      {ActivityLabel::Stationary, 60.0},
  };
  config.schedule_repeats = 1;
  config.t_c_sweep = {2.0, 5.0};
  config.classifier.kind = classify::KnnParams{3};
  config.cv_folds = 5;
  config.cv_repetitions = 2;
  // re-derive subject seeds for the default root seed
  return ExperimentConfig::from(
      KeyValueConfig::parse_string(config.to_key_values().serialize()));
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
  const std::string command =
      std::string(CAPSIM_BIN) + " " + args + " > " + stdout_path.string() + " 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("run_simulate writes traces and a manifest, deterministically") {
  ExperimentConfig config = mini_config();
  const fs::path out_a = fresh_dir("sim-a");
  const fs::path out_b = fresh_dir("sim-b");

  const auto written = pipeline::run_simulate(config, out_a);
  CHECK(written.size() == 3);  // manifest + front + rear
  REQUIRE(fs::exists(out_a / "manifest.txt"));
  REQUIRE(fs::exists(out_a / "traces" / "s1_front.csv"));
  REQUIRE(fs::exists(out_a / "traces" / "s1_rear.csv"));

  pipeline::run_simulate(config, out_b);
  for (const char* name : {"manifest.txt", "traces/s1_front.csv", "traces/s1_rear.csv"})
    REQUIRE(read_file(out_a / name) == read_file(out_b / name));
}

TEST_CASE("the manifest reproduces the run byte for byte") {
  const ExperimentConfig config = mini_config();
  const fs::path out_a = fresh_dir("manifest-a");
  pipeline::run_simulate(config, out_a);

  const ExperimentConfig reloaded = ExperimentConfig::load(out_a / "manifest.txt");
  const fs::path out_b = fresh_dir("manifest-b");
  pipeline::run_simulate(reloaded, out_b);
  REQUIRE(read_file(out_a / "traces" / "s1_front.csv") ==
          read_file(out_b / "traces" / "s1_front.csv"));
}

TEST_CASE("run_pipeline emits one report set per subject, mask, and window") {
  const ExperimentConfig config = mini_config();
  const fs::path out = fresh_dir("pipeline");
  pipeline::run_pipeline(config, out);

  int json_count = 0;
  for (const char* mask : {"front", "rear", "fused"}) {
    for (const char* tc : {"2", "5"}) {
      const std::string stem = std::string("s1_") + mask + "_tc" + tc;
      REQUIRE(fs::exists(out / "reports" / (stem + ".json")));
      REQUIRE(fs::exists(out / "reports" / (stem + ".confusion.csv")));
      REQUIRE(fs::exists(out / "reports" / (stem + ".txt")));
      ++json_count;
    }
  }
  CHECK(json_count == 6);

  const std::string aggregate = read_file(out / "aggregate.csv");
  // header + 3 masks x 2 windows
  CHECK(std::count(aggregate.begin(), aggregate.end(), '\n') == 7);
  CHECK(aggregate.find("fused,5,") != std::string::npos);
}

TEST_CASE("invalid configurations are rejected before any file is written") {
  ExperimentConfig config = mini_config();
  config.capacitor.v_rating = 5.0;  // fails the linearity design rule
  const fs::path out = fresh_dir("rejected");
  CHECK_THROWS_AS(pipeline::run_simulate(config, out), ConfigError);
  CHECK(!fs::exists(out / "manifest.txt"));
}

TEST_CASE("cli: power table carries the reference numbers") {
  const fs::path dir = fresh_dir("cli-power");
  REQUIRE(run_cli("power", dir / "out.txt") == 0);
  const std::string text = read_file(dir / "out.txt");
  CHECK(text.find("13.11") != std::string::npos);
  CHECK(text.find("6.06") != std::string::npos);
  CHECK(text.find("28.15") != std::string::npos);
  CHECK(text.find("75.89") != std::string::npos);

  // value-level checks on the CSV form: within 0.01 of the quoted numbers
  REQUIRE(run_cli("power --csv", dir / "out.csv") == 0);
  std::ifstream csv(dir / "out.csv");
  std::string line;
  std::getline(csv, line);  // header
  double sensing, tx_uj, tx_ms, system;
  char name[64];
  std::getline(csv, line);
  REQUIRE(std::sscanf(line.c_str(), "%63[^,],25,250,%lf,%lf,%lf,%*f,%lf", name, &sensing,
                      &tx_uj, &tx_ms, &system) == 5);
  CHECK(std::abs(sensing - 13.11) <= 0.01);
  CHECK(std::abs(tx_uj - 75.89) <= 0.01);
  CHECK(std::abs(tx_ms - 24.25) <= 0.01);
  CHECK(std::abs(system - 28.15) <= 0.01);
  std::getline(csv, line);
  REQUIRE(std::sscanf(line.c_str(), "%63[^,],0.2,2,%lf,%lf,%lf,%*f,%lf", name, &sensing, &tx_uj,
                      &tx_ms, &system) == 5);
  CHECK(std::abs(sensing - 6.06) <= 0.01);
  CHECK(std::abs(tx_uj - 7.43) <= 0.01);
  CHECK(std::abs(system - 7.53) <= 0.01);
}

TEST_CASE("cli: sleep power override reaches the 1.41 uW configuration") {
  const fs::path dir = fresh_dir("cli-sleep");
  REQUIRE(run_cli("power --sleep-uw 1.35 --csv", dir / "out.csv") == 0);
  const std::string text = read_file(dir / "out.csv");
  CHECK(text.find("capacitor-0.2Hz,0.2,2,1.407") != std::string::npos);
}

TEST_CASE("cli: beacon-only payload row matches the state machine") {
  const fs::path dir = fresh_dir("cli-beacon");
  REQUIRE(run_cli("power --payload 0 --csv", dir / "out.csv") == 0);
  const std::string text = read_file(dir / "out.csv");
  CHECK(text.find("custom,0.2,0,6.056880,7.236240,4.280000") != std::string::npos);
}

TEST_CASE("cli: config errors exit with status 2") {
  const fs::path dir = fresh_dir("cli-err");
  const fs::path config_path = dir / "bad.cfg";
  std::ofstream(config_path) << "capacitor.v_rating_volts=5\n";
  const int code =
      run_cli("simulate --config " + config_path.string() + " --out " + (dir / "out").string(),
              dir / "out.txt");
  CHECK(code == 2);
  const std::string text = read_file(dir / "out.txt");
  CHECK(text.find("10.18") != std::string::npos);

  CHECK(run_cli("pipeline --no-such-flag", dir / "usage.txt") == 2);
}

TEST_CASE("cli: sample and features invocations round-trip through files") {
  const fs::path dir = fresh_dir("cli-flow");
  ExperimentConfig config = mini_config();
  config.export_dt_s = 0.1;
  pipeline::run_simulate(config, dir / "sim");

  const std::string front = (dir / "sim" / "traces" / "s1_front.csv").string();
  const std::string rear = (dir / "sim" / "traces" / "s1_rear.csv").string();
  REQUIRE(run_cli("sample --trace " + front + " --tc 5 --out " + (dir / "samples.csv").string(),
                  dir / "sample.log") == 0);
  REQUIRE(fs::exists(dir / "samples.csv"));

  REQUIRE(run_cli("features --front " + front + " --rear " + rear + " --tc 5 --out " +
                      (dir / "features.csv").string(),
                  dir / "features.log") == 0);
  REQUIRE(fs::exists(dir / "features.csv"));

  REQUIRE(run_cli("classify --features " + (dir / "features.csv").string() +
                      " --classifier knn --folds 5 --reps 2 --out " + (dir / "report").string(),
                  dir / "classify.log") == 0);
  CHECK(fs::exists(dir / "report" / "report.json"));
  CHECK(fs::exists(dir / "report" / "confusion.csv"));
  CHECK(fs::exists(dir / "report" / "summary.txt"));
}
