#include "capsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "capsim/errors.hpp"
#include "capsim/rng.hpp"

namespace capsim {

namespace {

double parse_double_field(const std::string& what, const std::string& text) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(what + ": malformed number '" + text + "'");
  }
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::string format_double(double value) {
  // shortest representation that parses back to the same double
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream stream(text);
  while (std::getline(stream, part, sep)) parts.push_back(part);
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig config;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    config.values_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t consumed = 0;
    const double value = std::stod(it->second, &consumed);
    if (consumed != it->second.size()) throw std::invalid_argument(it->second);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': malformed number '" + it->second + "'");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t consumed = 0;
    const int value = std::stoi(it->second, &consumed);
    if (consumed != it->second.size()) throw std::invalid_argument(it->second);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': malformed integer '" + it->second + "'");
  }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t consumed = 0;
    const std::uint64_t value = std::stoull(it->second, &consumed);
    if (consumed != it->second.size()) throw std::invalid_argument(it->second);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': malformed integer '" + it->second + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + it->second + "'");
}

void KeyValueConfig::set(const std::string& key, double value) { values_[key] = format_double(value); }
void KeyValueConfig::set(const std::string& key, int value) { values_[key] = std::to_string(value); }
void KeyValueConfig::set(const std::string& key, std::uint64_t value) {
  values_[key] = std::to_string(value);
}
void KeyValueConfig::set(const std::string& key, bool value) {
  values_[key] = value ? "true" : "false";
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
  return out.str();
}

namespace {

const char* position_key(PehPosition position) {
  return position == PehPosition::Front ? "front" : "rear";
}

std::string profile_key(ActivityLabel label, PehPosition position, const char* field) {
  std::string key = "profile.";
  key += to_string(label);
  key += '.';
  key += position_key(position);
  key += '.';
  key += field;
  return key;
}

std::string describe_classifier_kind(const classify::ClassifierSpec& spec) {
  return std::string(spec.name());
}

classify::ClassifierSpec classifier_from(const KeyValueConfig& kv,
                                         const ExperimentConfig& defaults) {
  classify::ClassifierSpec spec;
  const std::string kind =
      kv.get_string("classifier.kind", describe_classifier_kind(defaults.classifier));
  if (kind == "knn") {
    classify::KnnParams params;
    params.k = kv.get_int("classifier.knn_k", params.k);
    spec.kind = params;
  } else if (kind == "naive_bayes_kde") {
    spec.kind = classify::NaiveBayesKdeParams{};
  } else if (kind == "decision_tree") {
    classify::DecisionTreeParams params;
    params.min_leaf = kv.get_int("classifier.tree_min_leaf", params.min_leaf);
    spec.kind = params;
  } else if (kind == "random_forest") {
    classify::RandomForestParams params;
    params.n_trees = kv.get_int("classifier.forest_trees", params.n_trees);
    params.min_leaf = kv.get_int("classifier.forest_min_leaf", params.min_leaf);
    params.bootstrap = kv.get_bool("classifier.forest_bootstrap", params.bootstrap);
    params.features_per_split =
        kv.get_int("classifier.forest_features_per_split", params.features_per_split);
    spec.kind = params;
  } else {
    throw ConfigError("classifier.kind: unknown classifier '" + kind + "'");
  }
  return spec;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig config;
  config.subjects = {
      {"s1", 0.90, 1.05, 0},
      {"s2", 1.00, 1.00, 0},
      {"s3", 1.15, 0.95, 0},
  };
  // One block of the per-subject session; repeated schedule_repeats times.
  // Block sizes keep every class populated after the estimator's discard
  // rules across the whole t_c sweep.
  config.schedule = {
      {ActivityLabel::Walk, 75.0},      {ActivityLabel::StairsUp, 200.0},
      {ActivityLabel::StairsDown, 150.0}, {ActivityLabel::Run, 250.0},
      {ActivityLabel::Stationary, 45.0},
  };
  config.profiles = activity::default_profile_table();
  for (auto& subject : config.subjects)
    subject.rng_seed = derive_seed(config.seed, "subject/" + subject.id);
  return config;
}

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& kv) {
  const ExperimentConfig base = defaults();

  // reject unknown keys up front: the canonical key set is the manifest of
  // the defaults
  {
    const KeyValueConfig canonical = base.to_key_values();
    for (const auto& [key, value] : kv.values()) {
      (void)value;
      if (!canonical.has(key)) throw ConfigError("unknown config key '" + key + "'");
    }
  }

  ExperimentConfig config = base;
  config.seed = kv.get_u64("seed", base.seed);
  config.sim_dt_s = kv.get_double("sim.dt_s", base.sim_dt_s);
  config.sim_v0 = kv.get_double("sim.v0_volts", base.sim_v0);
  config.export_dt_s = kv.get_double("sim.export_dt_s", base.export_dt_s);

  config.capacitor.capacitance_f = kv.get_double("capacitor.capacitance_f", base.capacitor.capacitance_f);
  config.capacitor.v_rating = kv.get_double("capacitor.v_rating_volts", base.capacitor.v_rating);
  config.capacitor.leak_resistance_ohm =
      kv.get_double("capacitor.leak_resistance_ohm", base.capacitor.leak_resistance_ohm);
  config.buck.v_uvlo_rising = kv.get_double("buck.v_uvlo_rising_volts", base.buck.v_uvlo_rising);
  config.buck.v_uvlo_falling = kv.get_double("buck.v_uvlo_falling_volts", base.buck.v_uvlo_falling);
  config.buck.discharge_duration_s =
      kv.get_double("buck.discharge_duration_s", base.buck.discharge_duration_s);
  config.v_s_ref = kv.get_double("source.v_s_ref_volts", base.v_s_ref);
  config.r_series_ohm = kv.get_double("source.r_series_ohm", base.r_series_ohm);

  config.adc.bits = kv.get_int("adc.bits", base.adc.bits);
  config.adc.v_ref = kv.get_double("adc.v_ref_volts", base.adc.v_ref);
  config.t_c_s = kv.get_double("sampler.t_c_s", base.t_c_s);
  config.random_phase = kv.get_bool("sampler.random_phase", base.random_phase);
  config.fuse.flat_eps_vps = kv.get_double("sampler.flat_eps_vps", base.fuse.flat_eps_vps);
  config.fuse.flat_floor_vps = kv.get_double("sampler.flat_floor_vps", base.fuse.flat_floor_vps);

  if (kv.has("sweep.t_c_list_s")) {
    config.t_c_sweep.clear();
    for (const std::string& item : split(kv.get_string("sweep.t_c_list_s", ""), ','))
      config.t_c_sweep.push_back(parse_double_field("sweep.t_c_list_s", trim(item)));
  }

  config.classifier = classifier_from(kv, base);
  config.cv_folds = kv.get_int("cv.folds", base.cv_folds);
  config.cv_repetitions = kv.get_int("cv.repetitions", base.cv_repetitions);

  if (kv.has("subjects")) {
    config.subjects.clear();
    for (const std::string& item : split(kv.get_string("subjects", ""), ',')) {
      const auto fields = split(item, ':');
      if (fields.size() != 3)
        throw ConfigError("subjects: expected id:intensity:cadence, got '" + item + "'");
      activity::SubjectParams subject;
      subject.id = trim(fields[0]);
      subject.intensity_scale = parse_double_field("subjects", trim(fields[1]));
      subject.cadence_scale = parse_double_field("subjects", trim(fields[2]));
      config.subjects.push_back(subject);
    }
  }
  for (auto& subject : config.subjects)
    subject.rng_seed = derive_seed(config.seed, "subject/" + subject.id);

  if (kv.has("schedule")) {
    config.schedule.clear();
    for (const std::string& item : split(kv.get_string("schedule", ""), ',')) {
      const auto fields = split(item, ':');
      if (fields.size() != 2)
        throw ConfigError("schedule: expected LABEL:seconds, got '" + item + "'");
      const auto label = parse_activity_label(trim(fields[0]));
      if (!label) throw ConfigError("schedule: unknown label '" + fields[0] + "'");
      config.schedule.emplace_back(*label, parse_double_field("schedule", trim(fields[1])));
    }
  }
  config.schedule_repeats = kv.get_int("schedule.repeats", base.schedule_repeats);

  for (ActivityLabel label : kAllActivityLabels) {
    for (PehPosition position : {PehPosition::Front, PehPosition::Rear}) {
      activity::StrikeParams& p = position == PehPosition::Front
                                      ? config.profiles.at(label).front
                                      : config.profiles.at(label).rear;
      p.strike_rate_hz = kv.get_double(profile_key(label, position, "strike_rate_hz"), p.strike_rate_hz);
      p.v_s_mean = kv.get_double(profile_key(label, position, "v_s_mean_volts"), p.v_s_mean);
      p.v_s_jitter_rel = kv.get_double(profile_key(label, position, "jitter_rel"), p.v_s_jitter_rel);
      p.burst_duty = kv.get_double(profile_key(label, position, "burst_duty"), p.burst_duty);
    }
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from(KeyValueConfig::parse_file(path));
}

KeyValueConfig ExperimentConfig::to_key_values() const {
  KeyValueConfig kv;
  kv.set("seed", seed);
  kv.set("sim.dt_s", sim_dt_s);
  kv.set("sim.v0_volts", sim_v0);
  kv.set("sim.export_dt_s", export_dt_s);
  kv.set("capacitor.capacitance_f", capacitor.capacitance_f);
  kv.set("capacitor.v_rating_volts", capacitor.v_rating);
  kv.set("capacitor.leak_resistance_ohm", capacitor.leak_resistance_ohm);
  kv.set("buck.v_uvlo_rising_volts", buck.v_uvlo_rising);
  kv.set("buck.v_uvlo_falling_volts", buck.v_uvlo_falling);
  kv.set("buck.discharge_duration_s", buck.discharge_duration_s);
  kv.set("source.v_s_ref_volts", v_s_ref);
  kv.set("source.r_series_ohm", r_series_ohm);
  kv.set("adc.bits", adc.bits);
  kv.set("adc.v_ref_volts", adc.v_ref);
  kv.set("sampler.t_c_s", t_c_s);
  kv.set("sampler.random_phase", random_phase);
  kv.set("sampler.flat_eps_vps", fuse.flat_eps_vps);
  kv.set("sampler.flat_floor_vps", fuse.flat_floor_vps);

  std::string sweep;
  for (double t : t_c_sweep) {
    if (!sweep.empty()) sweep += ',';
    sweep += format_double(t);
  }
  kv.set("sweep.t_c_list_s", sweep);

  kv.set("classifier.kind", describe_classifier_kind(classifier));
  {
    classify::KnnParams knn;
    classify::DecisionTreeParams tree;
    classify::RandomForestParams forest;
    if (const auto* p = std::get_if<classify::KnnParams>(&classifier.kind)) knn = *p;
    if (const auto* p = std::get_if<classify::DecisionTreeParams>(&classifier.kind)) tree = *p;
    if (const auto* p = std::get_if<classify::RandomForestParams>(&classifier.kind)) forest = *p;
    kv.set("classifier.knn_k", knn.k);
    kv.set("classifier.tree_min_leaf", tree.min_leaf);
    kv.set("classifier.forest_trees", forest.n_trees);
    kv.set("classifier.forest_min_leaf", forest.min_leaf);
    kv.set("classifier.forest_bootstrap", forest.bootstrap);
    kv.set("classifier.forest_features_per_split", forest.features_per_split);
  }
  kv.set("cv.folds", cv_folds);
  kv.set("cv.repetitions", cv_repetitions);

  std::string subject_list;
  for (const auto& subject : subjects) {
    if (!subject_list.empty()) subject_list += ',';
    subject_list += subject.id + ':' + format_double(subject.intensity_scale) + ':' +
                    format_double(subject.cadence_scale);
  }
  kv.set("subjects", subject_list);

  std::string schedule_list;
  for (const auto& [label, duration] : schedule) {
    if (!schedule_list.empty()) schedule_list += ',';
    schedule_list += std::string(to_string(label)) + ':' + format_double(duration);
  }
  kv.set("schedule", schedule_list);
  kv.set("schedule.repeats", schedule_repeats);

  for (ActivityLabel label : kAllActivityLabels) {
    for (PehPosition position : {PehPosition::Front, PehPosition::Rear}) {
      const activity::StrikeParams& p = profiles.at(label).at(position);
      kv.set(profile_key(label, position, "strike_rate_hz"), p.strike_rate_hz);
      kv.set(profile_key(label, position, "v_s_mean_volts"), p.v_s_mean);
      kv.set(profile_key(label, position, "jitter_rel"), p.v_s_jitter_rel);
      kv.set(profile_key(label, position, "burst_duty"), p.burst_duty);
    }
  }
  return kv;
}

void ExperimentConfig::validate() const {
  capacitor.validate();
  buck.validate(capacitor.v_rating);
  if (sim_dt_s <= 0.0) throw ConfigError("sim.dt_s must be > 0");
  if (sim_v0 < 0.0 || sim_v0 > capacitor.v_rating)
    throw ConfigError("sim.v0_volts must be within [0, v_rating]");
  const double export_ratio = export_dt_s / sim_dt_s;
  if (export_dt_s < sim_dt_s ||
      std::abs(export_ratio - std::llround(export_ratio)) > 1e-9)
    throw ConfigError("sim.export_dt_s must be an integer multiple of sim.dt_s");
  if (r_series_ohm <= 0.0) throw ConfigError("source.r_series_ohm must be > 0");
  if (v_s_ref < 0.0) throw ConfigError("source.v_s_ref_volts must be >= 0");
  adc.validate();
  if (t_c_s <= 0.0) throw ConfigError("sampler.t_c_s must be > 0");
  for (double t : t_c_sweep)
    if (t < 1.0 || t > 10.0) throw ConfigError("sweep values must be within [1, 10] s");
  if (cv_folds < 2) throw ConfigError("cv.folds must be >= 2");
  if (cv_repetitions < 1) throw ConfigError("cv.repetitions must be >= 1");
  if (subjects.empty()) throw ConfigError("at least one subject is required");
  if (schedule.empty()) throw ConfigError("schedule must be non-empty");
  if (schedule_repeats < 1) throw ConfigError("schedule.repeats must be >= 1");
  for (const auto& subject : subjects) subject.validate();
  for (ActivityLabel label : kAllActivityLabels) profiles.at(label).validate();

  const auto linearity = circuit::check_linearity(capacitor, buck, v_s_ref);
  if (!linearity.ok) {
    char message[160];
    std::snprintf(message, sizeof(message),
                  "charging is not linear up to the buck rising threshold: requires "
                  "min(v_rating, v_s) >= %.2f V, available %.2f V",
                  linearity.v_max_required, linearity.v_max_available);
    throw ConfigError(message);
  }
}

activity::Schedule ExperimentConfig::expanded_schedule() const {
  activity::Schedule expanded;
  expanded.reserve(schedule.size() * static_cast<std::size_t>(schedule_repeats));
  for (int r = 0; r < schedule_repeats; ++r)
    expanded.insert(expanded.end(), schedule.begin(), schedule.end());
  return expanded;
}

}  // namespace capsim
