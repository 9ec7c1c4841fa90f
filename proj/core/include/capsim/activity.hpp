#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "capsim/labels.hpp"
#include "capsim/signal.hpp"

namespace capsim::activity {

// Foot-strike excitation parameters for one harvester position: bursts of
// rectified source voltage at the strike cadence, zero between strikes.
struct StrikeParams {
  double strike_rate_hz = 0.0;
  double v_s_mean = 0.0;        // burst amplitude (rectified volts)
  double v_s_jitter_rel = 0.0;  // relative amplitude jitter per strike, truncated gaussian
  double burst_duty = 0.5;      // fraction of the strike period the burst is on
};

struct ActivityProfile {
  ActivityLabel label = ActivityLabel::Stationary;
  StrikeParams front;
  StrikeParams rear;

  const StrikeParams& at(PehPosition position) const {
    return position == PehPosition::Front ? front : rear;
  }
  void validate() const;
};

// Per-activity excitation table, indexed by label. Defaults are calibrated so
// the downstream charging-rate features land in the intended per-class ranges;
// every entry can be overridden from the experiment config.
struct ProfileTable {
  std::array<ActivityProfile, kNumActivityLabels> profiles{};

  const ActivityProfile& at(ActivityLabel label) const { return profiles[label_index(label)]; }
  ActivityProfile& at(ActivityLabel label) { return profiles[label_index(label)]; }
};

// Overlapping defaults: front SU/SD and rear WALK/SD rates collide on purpose
// so that fusing both positions resolves what either alone cannot.
ProfileTable default_profile_table();

// Widely spaced, deterministic-friendly table for classifier oracle tests.
ProfileTable separable_profile_table();

struct SubjectParams {
  std::string id = "s1";
  double intensity_scale = 1.0;  // multiplies burst amplitudes
  double cadence_scale = 1.0;    // multiplies strike rates
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Scales the table entry for `label` by the subject's intensity and cadence.
ActivityProfile make_profile(ActivityLabel label, const SubjectParams& subject,
                             const ProfileTable& table = default_profile_table());

/// Synthesizes the burst source signal for one position. Bursts occur at the
/// strike cadence with per-strike amplitude v_s_mean·(1+jitter); the series is
/// zero between bursts and fully determined by the seed.
SourceSignal generate_source(const ActivityProfile& profile, PehPosition position,
                             double duration_s, double dt_s, std::uint64_t seed);

using Schedule = std::vector<std::pair<ActivityLabel, double>>;

struct SessionSignals {
  SourceSignal front;
  SourceSignal rear;
};

/// Concatenates per-activity segments into labeled front/rear source signals.
/// Strike times are shared between positions (same gait); burst amplitudes
/// use independent sub-streams derived from the subject seed. Segments
/// shorter than 5 s are rejected.
SessionSignals generate_session(const Schedule& schedule, const SubjectParams& subject,
                                double dt_s, const ProfileTable& table = default_profile_table());

}  // namespace capsim::activity
