#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capsim/classify.hpp"
#include "capsim/config.hpp"
#include "capsim/csv.hpp"
#include "capsim/errors.hpp"
#include "capsim/pipeline.hpp"
#include "capsim/power.hpp"
#include "capsim/rng.hpp"

namespace fs = std::filesystem;
using namespace capsim;

namespace {

struct ConfigArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string schedule;
  std::string subjects;
  std::string t_c_list;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file (defaults embedded)");
    cmd->add_option("--seed", seed, "root seed override");
    cmd->add_option("--schedule", schedule, "schedule override, e.g. WALK:20,RUN:30");
    cmd->add_option("--subjects", subjects, "subject list override, id:intensity:cadence,...");
    cmd->add_option("--tc-list", t_c_list, "accumulation window sweep, e.g. 1,2,3,4,5,6");
  }

  ExperimentConfig resolve() const {
    KeyValueConfig kv;
    if (!config_path.empty()) kv = KeyValueConfig::parse_file(config_path);
    if (seed) kv.set("seed", *seed);
    if (!schedule.empty()) kv.set("schedule", schedule);
    if (!subjects.empty()) kv.set("subjects", subjects);
    if (!t_c_list.empty()) kv.set("sweep.t_c_list_s", t_c_list);
    return ExperimentConfig::from(kv);
  }
};

sampler::SamplerConfig sampler_config(double t_c, int adc_bits, double adc_vref,
                                      bool random_phase, std::uint64_t phase_seed) {
  sampler::SamplerConfig cfg;
  cfg.t_c_s = t_c;
  cfg.adc.bits = adc_bits;
  cfg.adc.v_ref = adc_vref;
  cfg.random_phase = random_phase;
  cfg.phase_seed = phase_seed;
  return cfg;
}

void write_classify_outputs(const classify::EvalReport& report, const std::string& mask,
                            const std::string& classifier, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  io::write_confusion_csv(report, out_dir / "confusion.csv");
  std::ofstream summary(out_dir / "summary.txt", std::ios::binary);
  summary << io::summarize_report(report);

  nlohmann::ordered_json j;
  j["mask"] = mask;
  j["classifier"] = classifier;
  j["accuracy_mean_pct"] = report.accuracy_mean_pct;
  j["accuracy_std_pct"] = report.accuracy_std_pct;
  j["folds"] = report.folds;
  j["repetitions"] = report.repetitions;
  j["cv_seed"] = report.seed;
  j["confusion"] = report.confusion;
  std::ofstream json_out(out_dir / "report.json", std::ios::binary);
  json_out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacitor charging-rate activity sensing: simulator and analysis toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate per-subject voltage trace CSVs");
  ConfigArgs simulate_args;
  simulate_args.attach(simulate);
  std::string simulate_out = "out";
  simulate->add_option("--out", simulate_out, "output directory");

  // sample
  auto* sample = app.add_subcommand("sample", "sparse-sample a trace through the ADC");
  std::string sample_trace, sample_out = "samples.csv";
  double sample_tc = 5.0, sample_vref = 5.0;
  int sample_bits = 10;
  bool sample_random_phase = false;
  std::uint64_t sample_phase_seed = 0;
  sample->add_option("--trace", sample_trace, "input trace CSV")->required();
  sample->add_option("--out", sample_out, "output CSV");
  sample->add_option("--tc", sample_tc, "accumulation window (s)");
  sample->add_option("--adc-bits", sample_bits, "ADC resolution");
  sample->add_option("--adc-vref", sample_vref, "ADC reference voltage");
  sample->add_flag("--random-phase", sample_random_phase, "randomize the sampling phase");
  sample->add_option("--phase-seed", sample_phase_seed, "seed for the random phase");

  // features
  auto* features = app.add_subcommand("features", "fuse front/rear traces into rate features");
  std::string features_front, features_rear, features_out = "features.csv";
  double features_tc = 5.0, features_vref = 5.0;
  int features_bits = 10;
  features->add_option("--front", features_front, "front trace CSV")->required();
  features->add_option("--rear", features_rear, "rear trace CSV")->required();
  features->add_option("--out", features_out, "output CSV");
  features->add_option("--tc", features_tc, "accumulation window (s)");
  features->add_option("--adc-bits", features_bits, "ADC resolution");
  features->add_option("--adc-vref", features_vref, "ADC reference voltage");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "cross-validate a feature CSV");
  std::string classify_features, classify_mask = "fused", classify_kind = "random_forest";
  std::string classify_out = "report";
  int classify_folds = 10, classify_reps = 10;
  std::uint64_t classify_seed = 42;
  classify_cmd->add_option("--features", classify_features, "input features CSV")->required();
  classify_cmd->add_option("--mask", classify_mask, "front|rear|fused");
  classify_cmd->add_option("--classifier", classify_kind,
                           "knn|naive_bayes_kde|decision_tree|random_forest");
  classify_cmd->add_option("--folds", classify_folds, "cross-validation folds");
  classify_cmd->add_option("--reps", classify_reps, "cross-validation repetitions");
  classify_cmd->add_option("--seed", classify_seed, "cross-validation seed");
  classify_cmd->add_option("--out", classify_out, "output directory");

  // pipeline
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "end-to-end sweep: simulate, extract features, cross-validate");
  ConfigArgs pipeline_args;
  pipeline_args.attach(pipeline_cmd);
  std::string pipeline_out = "out";
  pipeline_cmd->add_option("--out", pipeline_out, "output directory");

  // power
  auto* power_cmd = app.add_subcommand("power", "duty-cycled system power comparison table");
  double power_sample_uw = 480.0, power_sample_ms = 0.6, power_sleep_uw = 6.0, power_period = 5.0;
  std::optional<double> power_rate;
  std::optional<int> power_payload;
  bool power_csv = false;
  power_cmd->add_option("--sample-uw", power_sample_uw, "power during one sampling event (uW)");
  power_cmd->add_option("--sample-ms", power_sample_ms, "duration of one sampling event (ms)");
  power_cmd->add_option("--sleep-uw", power_sleep_uw, "deep-sleep power (uW)");
  power_cmd->add_option("--period", power_period, "reporting period (s)");
  power_cmd->add_option("--rate-hz", power_rate, "custom scenario sampling rate");
  power_cmd->add_option("--payload", power_payload, "custom scenario payload bytes");
  power_cmd->add_flag("--csv", power_csv, "emit CSV instead of aligned text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      const auto written = pipeline::run_simulate(simulate_args.resolve(), simulate_out);
      for (const auto& path : written) std::cout << path.string() << '\n';
    } else if (sample->parsed()) {
      const auto trace = io::read_trace_csv(sample_trace);
      const auto cfg = sampler_config(sample_tc, sample_bits, sample_vref, sample_random_phase,
                                      sample_phase_seed);
      io::write_sparse_csv(sampler::sparse_sample(trace, cfg), sample_out);
      std::cout << sample_out << '\n';
    } else if (features->parsed()) {
      const auto front = io::read_trace_csv(features_front);
      const auto rear = io::read_trace_csv(features_rear);
      const auto cfg = sampler_config(features_tc, features_bits, features_vref, false, 0);
      const auto fused = sampler::fuse(
          sampler::rate_windows(sampler::sparse_sample(front, cfg), cfg),
          sampler::rate_windows(sampler::sparse_sample(rear, cfg), cfg));
      io::write_features_csv(fused.features, fused.t_end_s, features_out);
      std::cout << features_out << " (" << fused.features.size() << " features from "
                << fused.stats.windows << " windows)\n";
    } else if (classify_cmd->parsed()) {
      const auto file = io::read_features_csv(classify_features);
      const auto mask = classify::parse_feature_mask(classify_mask);
      if (!mask) throw ConfigError("unknown mask '" + classify_mask + "'");
      KeyValueConfig kv;
      kv.set("classifier.kind", classify_kind);
      const ExperimentConfig cfg = ExperimentConfig::from(kv);
      const auto report =
          classify::cross_validate(cfg.classifier, pipeline::to_dataset(file.features, *mask),
                                   classify_folds, classify_reps, classify_seed);
      write_classify_outputs(report, classify_mask, classify_kind, classify_out);
      std::cout << io::summarize_report(report);
    } else if (pipeline_cmd->parsed()) {
      const auto written = pipeline::run_pipeline(pipeline_args.resolve(), pipeline_out);
      for (const auto& path : written) std::cout << path.string() << '\n';
    } else if (power_cmd->parsed()) {
      power::SensingPowerParams base;
      base.p_sample_uw = power_sample_uw;
      base.t_sample_ms = power_sample_ms;
      base.p_sleep_uw = power_sleep_uw;
      std::vector<pipeline::PowerScenario> scenarios = {
          {"transducer-25Hz", 25.0, 250},
          {"capacitor-0.2Hz", 0.2, 2},
      };
      if (power_rate || power_payload)
        scenarios.push_back({"custom", power_rate.value_or(0.2), power_payload.value_or(2)});
      const auto rows = pipeline::power_rows(base, power::TxProfile{}, power_period, scenarios);
      std::cout << pipeline::format_power_table(rows, power_csv);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
