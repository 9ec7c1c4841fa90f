#include "capsim/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "capsim/errors.hpp"
#include "capsim/rng.hpp"

namespace capsim::pipeline {

namespace fs = std::filesystem;

namespace {

// Removes everything written so far unless the run commits.
class OutputGuard {
 public:
  void note(const fs::path& path) { written_.push_back(path); }
  void commit() { committed_ = true; }
  const std::vector<fs::path>& written() const { return written_; }
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const fs::path& path : written_) fs::remove(path, ec);
  }

 private:
  std::vector<fs::path> written_;
  bool committed_ = false;
};

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

std::string tc_tag(double t_c_s) {
  char buffer[32];
  if (t_c_s == std::floor(t_c_s))
    std::snprintf(buffer, sizeof(buffer), "%d", static_cast<int>(t_c_s));
  else
    std::snprintf(buffer, sizeof(buffer), "%g", t_c_s);
  return buffer;
}

nlohmann::ordered_json report_json(const ExperimentConfig& config,
                                   const activity::SubjectParams& subject,
                                   classify::FeatureMask mask, double t_c_s,
                                   const sampler::FuseStats& stats,
                                   const classify::EvalReport& report) {
  nlohmann::ordered_json j;
  j["subject"] = subject.id;
  j["mask"] = std::string(to_string(mask));
  j["t_c_s"] = t_c_s;
  j["classifier"] = std::string(config.classifier.name());
  j["accuracy_mean_pct"] = report.accuracy_mean_pct;
  j["accuracy_std_pct"] = report.accuracy_std_pct;
  j["folds"] = report.folds;
  j["repetitions"] = report.repetitions;
  j["cv_seed"] = report.seed;
  j["instances"] = report.total_instances() / static_cast<std::uint64_t>(report.repetitions);
  nlohmann::ordered_json tpr;
  for (int c = 0; c < kNumActivityLabels; ++c)
    tpr[std::string(to_string(static_cast<ActivityLabel>(c)))] = report.per_class_tpr_pct[c];
  j["per_class_tpr_pct"] = tpr;
  j["confusion"] = report.confusion;
  nlohmann::ordered_json sampler_stats;
  sampler_stats["windows"] = stats.windows;
  sampler_stats["fused"] = stats.fused;
  sampler_stats["flat_pairs"] = stats.flat_pairs;
  sampler_stats["discarded_rate"] = stats.discarded_rate;
  sampler_stats["discarded_label"] = stats.discarded_label;
  sampler_stats["underestimated"] = stats.underestimated;
  j["sampler_stats"] = sampler_stats;
  nlohmann::ordered_json config_echo;
  const KeyValueConfig manifest = config.to_key_values();
  for (const auto& [key, value] : manifest.values()) config_echo[key] = value;
  j["config"] = config_echo;
  return j;
}

}  // namespace

SubjectTraces simulate_subject(const ExperimentConfig& config,
                               const activity::SubjectParams& subject) {
  const activity::SessionSignals session =
      activity::generate_session(config.expanded_schedule(), subject, config.sim_dt_s,
                                 config.profiles);
  SubjectTraces traces;
  traces.subject = subject;
  traces.front = circuit::simulate_trace(session.front, config.capacitor, config.buck,
                                         config.sim_dt_s, config.sim_v0, config.r_series_ohm);
  traces.rear = circuit::simulate_trace(session.rear, config.capacitor, config.buck,
                                        config.sim_dt_s, config.sim_v0, config.r_series_ohm);
  return traces;
}

sampler::FusedFeatures extract_features(const ExperimentConfig& config,
                                        const SubjectTraces& traces, double t_c_s) {
  sampler::SamplerConfig scfg;
  scfg.t_c_s = t_c_s;
  scfg.adc = config.adc;
  scfg.random_phase = config.random_phase;
  scfg.phase_seed = derive_seed(config.seed, "sampler-phase/" + traces.subject.id);

  const auto front_samples = sampler::sparse_sample(traces.front, scfg);
  const auto rear_samples = sampler::sparse_sample(traces.rear, scfg);
  const auto front_windows =
      sampler::rate_windows(front_samples, scfg, traces.front.discharge_times);
  const auto rear_windows =
      sampler::rate_windows(rear_samples, scfg, traces.rear.discharge_times);
  return sampler::fuse(front_windows, rear_windows, config.fuse);
}

classify::Dataset to_dataset(const std::vector<sampler::FeatureVector>& features,
                             classify::FeatureMask mask) {
  classify::Dataset dataset;
  dataset.vectors = features;
  dataset.mask = mask;
  return dataset;
}

std::vector<fs::path> run_simulate(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  fs::create_directories(out_dir / "traces");

  OutputGuard guard;
  const fs::path manifest_path = out_dir / "manifest.txt";
  write_text_file(manifest_path, config.to_key_values().serialize());
  guard.note(manifest_path);

  const int decimation = static_cast<int>(std::llround(config.export_dt_s / config.sim_dt_s));
  for (const activity::SubjectParams& subject : config.subjects) {
    const SubjectTraces traces = simulate_subject(config, subject);
    for (PehPosition position : {PehPosition::Front, PehPosition::Rear}) {
      const circuit::VoltageTrace& trace =
          position == PehPosition::Front ? traces.front : traces.rear;
      const fs::path path =
          out_dir / "traces" / (subject.id + "_" + std::string(to_string(position)) + ".csv");
      io::write_trace_csv(circuit::decimate(trace, decimation), path);
      guard.note(path);
    }
  }
  guard.commit();
  return guard.written();
}

classify::EvalReport evaluate_cell(const ExperimentConfig& config, const SubjectTraces& traces,
                                   classify::FeatureMask mask, double t_c_s) {
  const sampler::FusedFeatures fused = extract_features(config, traces, t_c_s);
  classify::ClassifierSpec spec = config.classifier;
  const std::uint64_t cv_seed =
      derive_seed(config.seed, "cv/" + traces.subject.id + "/" + std::string(to_string(mask)) +
                                   "/tc" + tc_tag(t_c_s));
  return classify::cross_validate(spec, to_dataset(fused.features, mask), config.cv_folds,
                                  config.cv_repetitions, cv_seed);
}

std::vector<fs::path> run_pipeline(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  fs::create_directories(out_dir / "reports");

  OutputGuard guard;
  const fs::path manifest_path = out_dir / "manifest.txt";
  write_text_file(manifest_path, config.to_key_values().serialize());
  guard.note(manifest_path);

  constexpr std::array<classify::FeatureMask, 3> kMasks = {
      classify::FeatureMask::FrontOnly, classify::FeatureMask::RearOnly,
      classify::FeatureMask::Fused};

  // accumulate per (mask, t_c) over subjects for the aggregate table
  std::map<std::pair<std::string, double>, std::vector<double>> aggregate;

  for (const activity::SubjectParams& subject : config.subjects) {
    const SubjectTraces traces = simulate_subject(config, subject);
    for (double t_c : config.t_c_sweep) {
      const sampler::FusedFeatures fused = extract_features(config, traces, t_c);
      for (classify::FeatureMask mask : kMasks) {
        const std::uint64_t cv_seed = derive_seed(
            config.seed,
            "cv/" + subject.id + "/" + std::string(to_string(mask)) + "/tc" + tc_tag(t_c));
        const classify::EvalReport report =
            classify::cross_validate(config.classifier, to_dataset(fused.features, mask),
                                     config.cv_folds, config.cv_repetitions, cv_seed);

        const std::string stem =
            subject.id + "_" + std::string(to_string(mask)) + "_tc" + tc_tag(t_c);
        const fs::path json_path = out_dir / "reports" / (stem + ".json");
        write_text_file(json_path,
                        report_json(config, subject, mask, t_c, fused.stats, report).dump(2) +
                            "\n");
        guard.note(json_path);
        const fs::path confusion_path = out_dir / "reports" / (stem + ".confusion.csv");
        io::write_confusion_csv(report, confusion_path);
        guard.note(confusion_path);
        const fs::path summary_path = out_dir / "reports" / (stem + ".txt");
        write_text_file(summary_path, io::summarize_report(report));
        guard.note(summary_path);

        aggregate[{std::string(to_string(mask)), t_c}].push_back(report.accuracy_mean_pct);
      }
    }
  }

  std::ostringstream agg;
  agg << "mask,t_c_s,accuracy_mean_pct,accuracy_min_pct,accuracy_max_pct,subjects\n";
  for (classify::FeatureMask mask : kMasks) {
    for (double t_c : config.t_c_sweep) {
      const auto& values = aggregate[{std::string(to_string(mask)), t_c}];
      double sum = 0.0, lo = values.front(), hi = values.front();
      for (double v : values) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      agg << to_string(mask) << ',' << tc_tag(t_c) << ','
          << io::format_fixed6(sum / static_cast<double>(values.size())) << ','
          << io::format_fixed6(lo) << ',' << io::format_fixed6(hi) << ',' << values.size()
          << '\n';
    }
  }
  const fs::path aggregate_path = out_dir / "aggregate.csv";
  write_text_file(aggregate_path, agg.str());
  guard.note(aggregate_path);

  guard.commit();
  return guard.written();
}

std::vector<PowerRow> power_rows(const power::SensingPowerParams& base,
                                 const power::TxProfile& tx_profile, double period_s,
                                 const std::vector<PowerScenario>& scenarios) {
  std::vector<PowerRow> rows;
  rows.reserve(scenarios.size());
  for (const PowerScenario& scenario : scenarios) {
    power::SensingPowerParams sensing = base;
    sensing.rate_hz = scenario.rate_hz;
    const power::TxCost tx = power::tx_energy(tx_profile, scenario.payload_bytes);
    power::SystemPowerInput input;
    input.sensing = sensing;
    input.tx_energy_uj = tx.energy_uj;
    input.tx_duration_ms = tx.duration_ms;
    input.period_s = period_s;

    PowerRow row;
    row.scenario = scenario.name;
    row.rate_hz = scenario.rate_hz;
    row.payload_bytes = scenario.payload_bytes;
    row.sensing_uw = power::sensing_power_uw(sensing);
    row.tx_energy_uj = tx.energy_uj;
    row.tx_duration_ms = tx.duration_ms;
    row.tx_avg_power_mw = tx.avg_power_mw();
    row.system_uw = power::system_power_uw(input);
    rows.push_back(row);
  }
  return rows;
}

std::string format_power_table(const std::vector<PowerRow>& rows, bool csv) {
  std::ostringstream out;
  char line[256];
  if (csv) {
    out << "scenario,rate_hz,payload_bytes,sensing_uw,tx_energy_uj,tx_duration_ms,"
           "tx_avg_power_mw,system_uw\n";
    for (const PowerRow& r : rows) {
      std::snprintf(line, sizeof(line), "%s,%g,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                    r.scenario.c_str(), r.rate_hz, r.payload_bytes, r.sensing_uw, r.tx_energy_uj,
                    r.tx_duration_ms, r.tx_avg_power_mw, r.system_uw);
      out << line;
    }
    return out.str();
  }

  std::snprintf(line, sizeof(line), "%-20s %9s %9s %12s %12s %9s %9s %11s\n", "scenario",
                "rate_hz", "payload_B", "sensing_uW", "tx_uJ", "tx_ms", "tx_mW", "system_uW");
  out << line;
  for (const PowerRow& r : rows) {
    std::snprintf(line, sizeof(line), "%-20s %9.3g %9d %12.2f %12.2f %9.2f %9.3f %11.2f\n",
                  r.scenario.c_str(), r.rate_hz, r.payload_bytes, r.sensing_uw, r.tx_energy_uj,
                  r.tx_duration_ms, r.tx_avg_power_mw, r.system_uw);
    out << line;
  }
  if (rows.size() == 2) {
    const PowerRow& a = rows[0];
    const PowerRow& b = rows[1];
    std::snprintf(line, sizeof(line),
                  "savings (%s vs %s): sampling %.1f%%, transmission %.1f%%, system %.1f%%\n",
                  b.scenario.c_str(), a.scenario.c_str(),
                  100.0 * (1.0 - b.sensing_uw / a.sensing_uw),
                  100.0 * (1.0 - b.tx_energy_uj / a.tx_energy_uj),
                  100.0 * (1.0 - b.system_uw / a.system_uw));
    out << line;
  }
  return out.str();
}

}  // namespace capsim::pipeline
