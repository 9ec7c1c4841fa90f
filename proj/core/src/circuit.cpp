#include "capsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capsim/errors.hpp"

namespace capsim::circuit {

void CapacitorSpec::validate() const {
  if (capacitance_f <= 0.0) throw ConfigError("CapacitorSpec: capacitance must be > 0");
  if (v_rating <= 0.0) throw ConfigError("CapacitorSpec: rating voltage must be > 0");
  if (leak_resistance_ohm <= 0.0) throw ConfigError("CapacitorSpec: leak resistance must be > 0");
}

void BuckSpec::validate(double v_rating) const {
  if (!(0.0 < v_uvlo_falling && v_uvlo_falling < v_uvlo_rising && v_uvlo_rising <= v_rating))
    throw ConfigError("BuckSpec: need 0 < falling < rising <= v_rating");
  if (discharge_duration_s <= 0.0) throw ConfigError("BuckSpec: discharge duration must be > 0");
}

void SourceModel::validate() const {
  if (v_s < 0.0) throw ConfigError("SourceModel: source voltage must be >= 0");
  if (r_series_ohm <= 0.0) throw ConfigError("SourceModel: series resistance must be > 0");
}

void VoltageTrace::validate() const {
  if (dt_s <= 0.0) throw ConfigError("VoltageTrace: dt must be > 0");
  if (labels.size() != samples.size())
    throw ConfigError("VoltageTrace: labels length must equal samples length");
}

double charge_voltage_closed_form(double t_s, double v0, const SourceModel& src,
                                  const CapacitorSpec& cap) {
  cap.validate();
  src.validate();
  if (t_s < 0.0) throw std::domain_error("charge_voltage_closed_form: t must be >= 0");
  const double v_max = std::min(cap.v_rating, src.v_s);
  if (v0 < 0.0 || v0 > v_max)
    throw std::domain_error("charge_voltage_closed_form: need 0 <= v0 <= min(v_rating, v_s)");
  return v_max + (v0 - v_max) * std::exp(-t_s / src.tau_s(cap));
}

LinearityReport check_linearity(const CapacitorSpec& cap, const BuckSpec& buck, double v_s) {
  cap.validate();
  buck.validate(cap.v_rating);
  LinearityReport report;
  report.v_max_required = buck.v_uvlo_rising / kHalfTauChargeFraction;
  report.v_max_available = std::min(cap.v_rating, v_s);
  report.ok = report.v_max_available >= report.v_max_required;
  return report;
}

namespace {

// Exact update of the linear charging ODE over a step with constant source.
// While v < v_s both the source path and the leak conduct; above v_s the
// rectifier blocks and only the leak drains the capacitor.
double integrate_charging(double v, double v_s, double h, const SourceModel& src,
                          const CapacitorSpec& cap) {
  const double tau_leak = cap.leak_resistance_ohm * cap.capacitance_f;
  if (v > v_s) {
    const double decayed = v * std::exp(-h / tau_leak);
    if (v_s > 0.0 && decayed < v_s) {
      // crossed into the conducting regime mid-step
      const double t_cross = tau_leak * std::log(v / v_s);
      return integrate_charging(v_s, v_s, h - t_cross, src, cap);
    }
    return decayed;
  }
  const double tau = src.tau_s(cap);
  const double rate = 1.0 / tau + 1.0 / tau_leak;
  const double v_inf = (v_s / tau) / rate;
  return v_inf + (v - v_inf) * std::exp(-rate * h);
}

}  // namespace

ChargeState step(const ChargeState& state, double dt_s, const SourceModel& src,
                 const CapacitorSpec& cap, const BuckSpec& buck) {
  cap.validate();
  buck.validate(cap.v_rating);
  src.validate();
  if (dt_s <= 0.0) throw ConfigError("step: dt must be > 0");
  if (dt_s > buck.discharge_duration_s / 4.0)
    throw ConfigError("step: dt must be <= discharge_duration/4 to resolve the discharge ramp");

  ChargeState next = state;
  double remaining = dt_s;

  if (next.phase == Phase::Discharging) {
    const double ramp_left = buck.discharge_duration_s - next.discharge_elapsed_s;
    if (remaining < ramp_left - 1e-12) {
      next.discharge_elapsed_s += remaining;
      const double progress = next.discharge_elapsed_s / buck.discharge_duration_s;
      next.v = buck.v_uvlo_rising - (buck.v_uvlo_rising - buck.v_uvlo_falling) * progress;
      next.t += remaining;
      return next;
    }
    next.v = buck.v_uvlo_falling;
    next.phase = Phase::Charging;
    next.discharge_elapsed_s = 0.0;
    next.t += std::min(ramp_left, remaining);
    remaining -= std::min(ramp_left, remaining);
  }

  if (remaining > 0.0) {
    double v = integrate_charging(next.v, src.v_s, remaining, src, cap);
    v = std::clamp(v, 0.0, cap.v_rating);
    next.t += remaining;
    if (v >= buck.v_uvlo_rising) {
      v = buck.v_uvlo_rising;
      next.phase = Phase::Discharging;
      next.discharge_elapsed_s = 0.0;
    }
    next.v = v;
  }
  return next;
}

VoltageTrace simulate_trace(const activity::SourceSignal& src_signal, const CapacitorSpec& cap,
                            const BuckSpec& buck, double dt_s, double v0, double r_series_ohm) {
  src_signal.validate();
  cap.validate();
  buck.validate(cap.v_rating);
  if (dt_s <= 0.0) throw ConfigError("simulate_trace: dt must be > 0");
  if (v0 < 0.0 || v0 > cap.v_rating)
    throw ConfigError("simulate_trace: v0 must be within [0, v_rating]");

  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(src_signal.duration_s() / dt_s));
  const double grid_ratio = dt_s / src_signal.dt_s;

  VoltageTrace trace;
  trace.dt_s = dt_s;
  trace.samples.reserve(n_steps + 1);
  trace.labels.reserve(n_steps + 1);

  ChargeState state;
  state.v = v0;
  trace.samples.push_back(state.v);
  trace.labels.push_back(src_signal.labels.front());

  SourceModel src;
  src.r_series_ohm = r_series_ohm;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const auto src_index = std::min(
        static_cast<std::size_t>(static_cast<double>(i) * grid_ratio + 1e-9),
        src_signal.steps() - 1);
    src.v_s = src_signal.v_s[src_index];
    const Phase before = state.phase;
    state = step(state, dt_s, src, cap, buck);
    if (before == Phase::Charging && state.phase == Phase::Discharging)
      trace.discharge_times.push_back(state.t);
    trace.samples.push_back(state.v);
    trace.labels.push_back(src_signal.labels[src_index]);
  }
  return trace;
}

double leak_resistance_from_decay(double v_start, double v_end, double elapsed_s,
                                  const CapacitorSpec& cap) {
  if (!(v_start > v_end && v_end > 0.0) || elapsed_s <= 0.0)
    throw ConfigError("leak_resistance_from_decay: need v_start > v_end > 0 and elapsed > 0");
  return elapsed_s / (cap.capacitance_f * std::log(v_start / v_end));
}

VoltageTrace decimate(const VoltageTrace& trace, int every_n) {
  trace.validate();
  if (every_n < 1) throw ConfigError("decimate: factor must be >= 1");
  if (every_n == 1) return trace;
  VoltageTrace out;
  out.dt_s = trace.dt_s * every_n;
  out.discharge_times = trace.discharge_times;
  for (std::size_t i = 0; i < trace.samples.size(); i += static_cast<std::size_t>(every_n)) {
    out.samples.push_back(trace.samples[i]);
    out.labels.push_back(trace.labels[i]);
  }
  return out;
}

}  // namespace capsim::circuit
