#pragma once

#include <cstdint>
#include <vector>

#include "capsim/circuit.hpp"
#include "capsim/labels.hpp"

namespace capsim::sampler {

// Successive-approximation ADC abstraction: quantize() truncates to one of
// 2^bits levels spanning [0, v_ref] and maps the level back to volts.
struct AdcSpec {
  int bits = 10;
  double v_ref = 5.0;

  int levels() const { return (1 << bits) - 1; }
  double lsb() const { return v_ref / levels(); }
  double quantize(double v) const;
  void validate() const;
};

struct SamplerConfig {
  double t_c_s = 5.0;  // accumulation window between MCU wake-ups
  AdcSpec adc;
  bool random_phase = false;      // offset the sampling grid by U(0, t_c)
  std::uint64_t phase_seed = 0;   // used only when random_phase is set

  void validate() const;
};

struct SparseSample {
  double t_s = 0.0;
  double v = 0.0;  // quantized volts
  ActivityLabel label = ActivityLabel::Stationary;
};

// One accumulation window between two adjacent sparse samples, before the
// retention rules are applied. r may be zero or negative here.
struct RateWindow {
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  double r_vps = 0.0;
  bool labels_match = false;
  ActivityLabel label = ActivityLabel::Stationary;
  bool contains_discharge = false;  // from trace diagnostics, when available

  bool retained() const { return labels_match && r_vps > 0.0; }
};

// Retained charging-rate feature for one position.
struct RateSample {
  double t_end_s = 0.0;
  double r_vps = 0.0;
  PehPosition position = PehPosition::Front;
  ActivityLabel label = ActivityLabel::Stationary;
};

// Fused per-window feature: rear rate first, front second.
struct FeatureVector {
  double r_rear_vps = 0.0;
  double r_front_vps = 0.0;
  ActivityLabel label = ActivityLabel::Stationary;
};

/// Reads the trace at t = 0, t_c, 2·t_c, … through the ADC quantizer.
/// Rejects traces shorter than 2·t_c (no rate would be computable).
std::vector<SparseSample> sparse_sample(const circuit::VoltageTrace& trace,
                                        const SamplerConfig& cfg);

/// Difference quotients over every adjacent sample pair. Windows whose
/// endpoint labels differ are marked non-matching; discharge containment is
/// filled in from the trace's recorded discharge times when provided.
std::vector<RateWindow> rate_windows(const std::vector<SparseSample>& samples,
                                     const SamplerConfig& cfg,
                                     const std::vector<double>& discharge_times = {});

/// Windows retained by the estimator: voltage strictly increased across the
/// window and both endpoints carry the same label.
std::vector<RateSample> estimate_rates(const std::vector<SparseSample>& samples,
                                       const SamplerConfig& cfg, PehPosition position);

struct FuseOptions {
  // A window pair is a feature only if both positions were retained, or both
  // rates sit in the near-zero band (r < flat_eps and r > -flat_floor), which
  // distinguishes an idle capacitor (leak-scale decay) from a buck discharge.
  double flat_eps_vps = 1e-4;
  double flat_floor_vps = 0.01;
};

struct FuseStats {
  std::size_t windows = 0;
  std::size_t fused = 0;
  std::size_t flat_pairs = 0;       // emitted as (0, 0)
  std::size_t discarded_rate = 0;   // a side was net-negative or unpaired
  std::size_t discarded_label = 0;  // mixed labels on either side
  std::size_t underestimated = 0;   // retained despite containing a discharge
};

struct FusedFeatures {
  std::vector<FeatureVector> features;
  std::vector<double> t_end_s;  // window end per feature
  FuseStats stats;
};

/// Pairs front/rear windows from the same session grid into feature vectors.
FusedFeatures fuse(const std::vector<RateWindow>& front, const std::vector<RateWindow>& rear,
                   const FuseOptions& options = {});

}  // namespace capsim::sampler
