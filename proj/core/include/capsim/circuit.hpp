#pragma once

#include <cstdint>
#include <vector>

#include "capsim/labels.hpp"
#include "capsim/signal.hpp"

namespace capsim::circuit {

// Fraction of the asymptotic voltage a capacitor reaches after charging for
// half a time constant; the linearity design rule uses this rounded value.
inline constexpr double kHalfTauChargeFraction = 0.393;

struct CapacitorSpec {
  double capacitance_f = 470e-6;
  double v_rating = 25.0;
  double leak_resistance_ohm = 5.177e6;  // effective self-discharge path

  void validate() const;
};

// Buck converter undervoltage-lockout behavior: the capacitor is drained from
// the rising threshold down to the falling threshold once it charges past the
// rising threshold, then charging resumes.
struct BuckSpec {
  double v_uvlo_rising = 4.0;
  double v_uvlo_falling = 3.08;
  double discharge_duration_s = 0.010;

  void validate(double v_rating) const;
};

// Equivalent rectified DC source feeding the capacitor through a series
// resistance. tau() is the charging time constant of the RC pair.
struct SourceModel {
  double v_s = 20.8;
  double r_series_ohm = 597.8e3;

  double tau_s(const CapacitorSpec& cap) const { return r_series_ohm * cap.capacitance_f; }
  void validate() const;
};

enum class Phase : std::uint8_t { Charging, Discharging };

struct ChargeState {
  double t = 0.0;
  double v = 0.0;
  Phase phase = Phase::Charging;
  // Time spent in the current discharge ramp; meaningful only while Discharging.
  double discharge_elapsed_s = 0.0;
};

// Dense simulated capacitor-voltage trace on a uniform grid, inclusive of the
// initial sample at t=0 (size = duration/dt + 1). discharge_times records the
// instants the buck converter engaged; it is diagnostic metadata and is not
// part of the CSV interchange format.
struct VoltageTrace {
  double dt_s = 0.0;
  std::vector<double> samples;
  std::vector<ActivityLabel> labels;
  std::vector<double> discharge_times;

  double duration_s() const {
    return samples.empty() ? 0.0 : dt_s * static_cast<double>(samples.size() - 1);
  }
  void validate() const;
};

/// Closed-form charging law for a constant source with leakage ignored:
/// V(t) = V_max + (v0 - V_max)·exp(-t/tau), V_max = min(v_rating, v_s).
/// Throws std::domain_error if v0 exceeds V_max.
double charge_voltage_closed_form(double t_s, double v0, const SourceModel& src,
                                  const CapacitorSpec& cap);

struct LinearityReport {
  bool ok = false;
  double v_max_required = 0.0;
  double v_max_available = 0.0;
};

/// Design check: charging stays approximately linear up to the buck rising
/// threshold iff min(v_rating, v_s) >= v_uvlo_rising / 0.393.
LinearityReport check_linearity(const CapacitorSpec& cap, const BuckSpec& buck, double v_s);

/// Advances the charge state by dt under a source held constant for the step.
/// Charging integrates dV/dt = (v_s - V)/(R·C) - V/(R_leak·C) exactly
/// (exponential update); the source term conducts only while V < v_s, as the
/// rectifier blocks reverse current. Crossing the rising UVLO threshold clamps
/// V there and starts a linear discharge ramp down to the falling threshold
/// over discharge_duration_s. Throws ConfigError if dt > discharge_duration/4.
ChargeState step(const ChargeState& state, double dt_s, const SourceModel& src,
                 const CapacitorSpec& cap, const BuckSpec& buck);

/// Integrates a labeled source signal into a dense voltage trace with the
/// given integration step. The source is sample-and-held at its own grid.
VoltageTrace simulate_trace(const activity::SourceSignal& src_signal, const CapacitorSpec& cap,
                            const BuckSpec& buck, double dt_s, double v0,
                            double r_series_ohm = SourceModel{}.r_series_ohm);

/// Calibrates the parallel leak resistance from an observed self-discharge
/// (v_start -> v_end over elapsed seconds with no source attached).
double leak_resistance_from_decay(double v_start, double v_end, double elapsed_s,
                                  const CapacitorSpec& cap);

/// Keeps every n-th sample (plus the final one falling on the coarse grid);
/// used to write traces at a coarser grid than the integration step.
VoltageTrace decimate(const VoltageTrace& trace, int every_n);

}  // namespace capsim::circuit
