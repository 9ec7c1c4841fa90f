#include "capsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "capsim/errors.hpp"

namespace capsim::io {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                             ": malformed number '" + text + "'");
  }
}

ActivityLabel parse_label(const std::string& text, const std::filesystem::path& path,
                          std::size_t line) {
  const auto label = parse_activity_label(text);
  if (!label)
    throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                             ": unknown activity label '" + text + "'");
  return *label;
}

}  // namespace

std::string format_fixed6(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

void write_trace_csv(const circuit::VoltageTrace& trace, const std::filesystem::path& path) {
  trace.validate();
  auto out = open_for_write(path);
  out << "t_s,v_volts,label\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    out << format_fixed6(static_cast<double>(i) * trace.dt_s) << ','
        << format_fixed6(trace.samples[i]) << ',' << to_string(trace.labels[i]) << '\n';
  }
}

circuit::VoltageTrace read_trace_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || line != "t_s,v_volts,label")
    throw std::runtime_error(path.string() + ": expected trace header t_s,v_volts,label");

  circuit::VoltageTrace trace;
  double prev_t = 0.0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 3 fields");
    const double t = parse_double(fields[0], path, line_no);
    trace.samples.push_back(parse_double(fields[1], path, line_no));
    trace.labels.push_back(parse_label(fields[2], path, line_no));
    if (trace.samples.size() == 2) trace.dt_s = t - prev_t;
    prev_t = t;
  }
  if (trace.samples.size() < 2)
    throw std::runtime_error(path.string() + ": trace needs at least two samples");
  trace.validate();
  return trace;
}

void write_sparse_csv(const std::vector<sampler::SparseSample>& samples,
                      const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "t_s,v_volts,label\n";
  for (const auto& s : samples)
    out << format_fixed6(s.t_s) << ',' << format_fixed6(s.v) << ',' << to_string(s.label)
        << '\n';
}

void write_features_csv(const std::vector<sampler::FeatureVector>& features,
                        const std::vector<double>& t_end_s, const std::filesystem::path& path) {
  if (features.size() != t_end_s.size())
    throw std::invalid_argument("write_features_csv: timestamp count mismatch");
  auto out = open_for_write(path);
  out << "t_end_s,r_rear_vps,r_front_vps,label\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << format_fixed6(t_end_s[i]) << ',' << format_fixed6(features[i].r_rear_vps) << ','
        << format_fixed6(features[i].r_front_vps) << ',' << to_string(features[i].label)
        << '\n';
  }
}

FeatureFile read_features_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || line != "t_end_s,r_rear_vps,r_front_vps,label")
    throw std::runtime_error(path.string() +
                             ": expected header t_end_s,r_rear_vps,r_front_vps,label");
  FeatureFile file;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 4 fields");
    file.t_end_s.push_back(parse_double(fields[0], path, line_no));
    sampler::FeatureVector fv;
    fv.r_rear_vps = parse_double(fields[1], path, line_no);
    fv.r_front_vps = parse_double(fields[2], path, line_no);
    fv.label = parse_label(fields[3], path, line_no);
    file.features.push_back(fv);
  }
  return file;
}

void write_confusion_csv(const classify::EvalReport& report, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "true\\predicted";
  for (ActivityLabel label : kAllActivityLabels) out << ',' << to_string(label);
  out << ",tpr_pct\n";
  for (int row = 0; row < kNumActivityLabels; ++row) {
    out << to_string(static_cast<ActivityLabel>(row));
    for (int col = 0; col < kNumActivityLabels; ++col) out << ',' << report.confusion[row][col];
    out << ',' << format_fixed6(report.per_class_tpr_pct[row]) << '\n';
  }
}

std::string summarize_report(const classify::EvalReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "accuracy: %.2f%% (std %.2f%%, %dx%d-fold CV, seed %llu)\n",
                report.accuracy_mean_pct, report.accuracy_std_pct, report.repetitions,
                report.folds, static_cast<unsigned long long>(report.seed));
  out << line;
  out << "per-class TPR:";
  for (int c = 0; c < kNumActivityLabels; ++c) {
    std::snprintf(line, sizeof(line), " %s %.2f%%", to_string(static_cast<ActivityLabel>(c)).data(),
                  report.per_class_tpr_pct[c]);
    out << line;
  }
  out << '\n';
  out << "confusion (rows true, cols predicted):\n";
  for (int row = 0; row < kNumActivityLabels; ++row) {
    std::snprintf(line, sizeof(line), "%5s", to_string(static_cast<ActivityLabel>(row)).data());
    out << line;
    for (int col = 0; col < kNumActivityLabels; ++col) {
      std::snprintf(line, sizeof(line), " %8llu",
                    static_cast<unsigned long long>(report.confusion[row][col]));
      out << line;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace capsim::io
