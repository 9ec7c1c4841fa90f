#include "capsim/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "capsim/errors.hpp"
#include "capsim/rng.hpp"

namespace capsim::sampler {

void AdcSpec::validate() const {
  if (bits < 8 || bits > 16) throw ConfigError("AdcSpec: bits must be in [8, 16]");
  if (v_ref <= 0.0) throw ConfigError("AdcSpec: reference voltage must be > 0");
}

double AdcSpec::quantize(double v) const {
  const double clamped = std::clamp(v, 0.0, v_ref);
  const auto level = static_cast<long>(clamped / v_ref * levels());
  return static_cast<double>(level) * v_ref / levels();
}

void SamplerConfig::validate() const {
  if (t_c_s <= 0.0) throw ConfigError("SamplerConfig: t_c must be > 0");
  adc.validate();
}

std::vector<SparseSample> sparse_sample(const circuit::VoltageTrace& trace,
                                        const SamplerConfig& cfg) {
  trace.validate();
  cfg.validate();
  if (trace.duration_s() < 2.0 * cfg.t_c_s)
    throw ConfigError("sparse_sample: trace must cover at least two accumulation windows");
  for (double v : trace.samples)
    if (v > cfg.adc.v_ref)
      throw ConfigError("sparse_sample: trace exceeds the ADC reference voltage");

  double phase = 0.0;
  if (cfg.random_phase) phase = Rng(cfg.phase_seed).uniform(0.0, cfg.t_c_s);

  std::vector<SparseSample> samples;
  const std::size_t last = trace.samples.size() - 1;
  for (std::size_t k = 0;; ++k) {
    const double t = phase + static_cast<double>(k) * cfg.t_c_s;
    const auto index = static_cast<std::size_t>(std::llround(t / trace.dt_s));
    if (index > last) break;
    samples.push_back({index * trace.dt_s, cfg.adc.quantize(trace.samples[index]),
                       trace.labels[index]});
  }
  return samples;
}

std::vector<RateWindow> rate_windows(const std::vector<SparseSample>& samples,
                                     const SamplerConfig& cfg,
                                     const std::vector<double>& discharge_times) {
  cfg.validate();
  std::vector<RateWindow> windows;
  if (samples.size() < 2) return windows;
  windows.reserve(samples.size() - 1);
  auto next_discharge = discharge_times.begin();
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const SparseSample& a = samples[i];
    const SparseSample& b = samples[i + 1];
    RateWindow w;
    w.t_start_s = a.t_s;
    w.t_end_s = b.t_s;
    w.r_vps = (b.v - a.v) / cfg.t_c_s;
    w.labels_match = a.label == b.label;
    w.label = b.label;
    while (next_discharge != discharge_times.end() && *next_discharge <= a.t_s)
      ++next_discharge;
    w.contains_discharge =
        next_discharge != discharge_times.end() && *next_discharge <= b.t_s;
    windows.push_back(w);
  }
  return windows;
}

std::vector<RateSample> estimate_rates(const std::vector<SparseSample>& samples,
                                       const SamplerConfig& cfg, PehPosition position) {
  std::vector<RateSample> rates;
  for (const RateWindow& w : rate_windows(samples, cfg)) {
    if (!w.retained()) continue;
    rates.push_back({w.t_end_s, w.r_vps, position, w.label});
  }
  return rates;
}

FusedFeatures fuse(const std::vector<RateWindow>& front, const std::vector<RateWindow>& rear,
                   const FuseOptions& options) {
  if (front.size() != rear.size())
    throw ConfigError("fuse: front and rear window sequences must share the sampling grid");

  const auto near_zero = [&options](double r) {
    return r < options.flat_eps_vps && r > -options.flat_floor_vps;
  };

  FusedFeatures out;
  out.stats.windows = front.size();
  for (std::size_t i = 0; i < front.size(); ++i) {
    const RateWindow& f = front[i];
    const RateWindow& r = rear[i];
    if (f.t_end_s != r.t_end_s)
      throw ConfigError("fuse: front and rear windows are not aligned");
    if (!f.labels_match || !r.labels_match || f.label != r.label) {
      ++out.stats.discarded_label;
      continue;
    }
    if (f.retained() && r.retained()) {
      out.features.push_back({r.r_vps, f.r_vps, f.label});
      out.t_end_s.push_back(f.t_end_s);
      ++out.stats.fused;
      if (f.contains_discharge || r.contains_discharge) ++out.stats.underestimated;
      continue;
    }
    if (near_zero(f.r_vps) && near_zero(r.r_vps)) {
      out.features.push_back({0.0, 0.0, f.label});
      out.t_end_s.push_back(f.t_end_s);
      ++out.stats.flat_pairs;
      continue;
    }
    ++out.stats.discarded_rate;
  }
  return out;
}

}  // namespace capsim::sampler
