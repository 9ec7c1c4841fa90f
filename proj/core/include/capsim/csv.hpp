#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capsim/circuit.hpp"
#include "capsim/classify.hpp"
#include "capsim/sampler.hpp"

namespace capsim::io {

/// Fixed-point with 6 decimal places; the canonical number format of every
/// CSV this project writes, so round-trips are exact in the written domain.
std::string format_fixed6(double value);

// Voltage traces (dense or sparse): header `t_s,v_volts,label`, UTF-8, LF.
void write_trace_csv(const circuit::VoltageTrace& trace, const std::filesystem::path& path);
circuit::VoltageTrace read_trace_csv(const std::filesystem::path& path);

void write_sparse_csv(const std::vector<sampler::SparseSample>& samples,
                      const std::filesystem::path& path);

// Fused features: header `t_end_s,r_rear_vps,r_front_vps,label`.
void write_features_csv(const std::vector<sampler::FeatureVector>& features,
                        const std::vector<double>& t_end_s, const std::filesystem::path& path);
struct FeatureFile {
  std::vector<sampler::FeatureVector> features;
  std::vector<double> t_end_s;
};
FeatureFile read_features_csv(const std::filesystem::path& path);

// Confusion matrix: header row/column of label names, counts, trailing TPR row.
void write_confusion_csv(const classify::EvalReport& report, const std::filesystem::path& path);

std::string summarize_report(const classify::EvalReport& report);

}  // namespace capsim::io
