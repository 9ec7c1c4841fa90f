#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capsim/config.hpp"
#include "capsim/csv.hpp"
#include "capsim/power.hpp"

namespace capsim::pipeline {

struct SubjectTraces {
  activity::SubjectParams subject;
  circuit::VoltageTrace front;
  circuit::VoltageTrace rear;
};

/// Generates the subject's session and integrates both capacitor traces at
/// full simulation resolution.
SubjectTraces simulate_subject(const ExperimentConfig& config,
                               const activity::SubjectParams& subject);

/// Sparse-samples both traces at t_c and fuses them into labeled features.
sampler::FusedFeatures extract_features(const ExperimentConfig& config,
                                        const SubjectTraces& traces, double t_c_s);

classify::Dataset to_dataset(const std::vector<sampler::FeatureVector>& features,
                             classify::FeatureMask mask);

/// `simulate` command: per-subject front/rear trace CSVs (on the export grid)
/// plus a manifest echoing the full effective configuration. Returns the
/// written paths; on failure everything written so far is removed.
std::vector<std::filesystem::path> run_simulate(const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir);

/// `pipeline` command: cross-validated reports per (subject, mask, t_c) plus
/// an aggregate accuracy table averaged over subjects.
std::vector<std::filesystem::path> run_pipeline(const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir);

/// One cross-validation cell of the pipeline, exposed for tests.
classify::EvalReport evaluate_cell(const ExperimentConfig& config, const SubjectTraces& traces,
                                   classify::FeatureMask mask, double t_c_s);

// ---- power comparison (the `power` command) ----

struct PowerScenario {
  std::string name;
  double rate_hz = 0.2;
  int payload_bytes = 2;
};

struct PowerRow {
  std::string scenario;
  double rate_hz = 0.0;
  int payload_bytes = 0;
  double sensing_uw = 0.0;
  double tx_energy_uj = 0.0;
  double tx_duration_ms = 0.0;
  double tx_avg_power_mw = 0.0;
  double system_uw = 0.0;
};

std::vector<PowerRow> power_rows(const power::SensingPowerParams& base,
                                 const power::TxProfile& tx_profile, double period_s,
                                 const std::vector<PowerScenario>& scenarios);

/// Renders rows as aligned text (csv=false) or CSV (csv=true); when exactly
/// two rows are present a savings summary is appended to the text form.
std::string format_power_table(const std::vector<PowerRow>& rows, bool csv);

}  // namespace capsim::pipeline
