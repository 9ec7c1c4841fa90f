#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "capsim/activity.hpp"
#include "capsim/circuit.hpp"
#include "capsim/classify.hpp"
#include "capsim/sampler.hpp"

namespace capsim {

// Plain-text `key=value` configuration ('#' starts a comment, keys are
// dot-sectioned). Also the manifest format: serialize() emits every key
// sorted, with doubles in shortest exact round-trip form, so a manifest can
// be fed back in as a config and reproduces the run bit-for-bit.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, bool value);

  std::string serialize() const;

 private:
  std::map<std::string, std::string> values_;
};

// Everything a run needs; defaults reproduce the reference hardware
// configuration so every subcommand works with no arguments.
struct ExperimentConfig {
  std::uint64_t seed = 42;

  double sim_dt_s = 0.001;
  double sim_v0 = 0.0;
  double export_dt_s = 0.1;  // trace CSV grid; must be a multiple of sim_dt_s

  circuit::CapacitorSpec capacitor;
  circuit::BuckSpec buck;
  double v_s_ref = 20.8;            // reference rectified source voltage
  double r_series_ohm = 597.8e3;    // charges 0 -> 4 V in ~60 s at v_s_ref

  sampler::AdcSpec adc;
  double t_c_s = 5.0;
  bool random_phase = false;
  sampler::FuseOptions fuse;
  std::vector<double> t_c_sweep = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};

  classify::ClassifierSpec classifier;
  int cv_folds = 10;
  int cv_repetitions = 10;

  std::vector<activity::SubjectParams> subjects;  // seeds derived from root seed
  activity::Schedule schedule;                    // one block, repeated
  int schedule_repeats = 5;
  activity::ProfileTable profiles;

  static ExperimentConfig defaults();
  static ExperimentConfig from(const KeyValueConfig& kv);
  static ExperimentConfig load(const std::filesystem::path& path);

  // Full effective configuration; parsing it back yields an equal config.
  KeyValueConfig to_key_values() const;

  // Rejects invalid sub-configs before any output is written, including the
  // charge-linearity design rule for the configured capacitor and source.
  void validate() const;

  activity::Schedule expanded_schedule() const;
};

}  // namespace capsim
