#include "capsim/activity.hpp"

#include <algorithm>
#include <cmath>

#include "capsim/errors.hpp"
#include "capsim/rng.hpp"

namespace capsim::activity {

void ActivityProfile::validate() const {
  for (const StrikeParams* p : {&front, &rear}) {
    if (p->strike_rate_hz < 0.0) throw ConfigError("ActivityProfile: strike rate must be >= 0");
    if (p->v_s_mean < 0.0) throw ConfigError("ActivityProfile: burst amplitude must be >= 0");
    if (p->v_s_jitter_rel < 0.0 || p->v_s_jitter_rel >= 1.0)
      throw ConfigError("ActivityProfile: jitter must be in [0, 1)");
    if (p->burst_duty <= 0.0 || p->burst_duty > 1.0)
      throw ConfigError("ActivityProfile: burst duty must be in (0, 1]");
  }
}

void SubjectParams::validate() const {
  if (intensity_scale < 0.5 || intensity_scale > 2.0 || cadence_scale < 0.5 ||
      cadence_scale > 2.0)
    throw ConfigError("SubjectParams: scales must be within [0.5, 2.0]");
}

namespace {

ActivityProfile entry(ActivityLabel label, StrikeParams front, StrikeParams rear) {
  ActivityProfile p;
  p.label = label;
  p.front = front;
  p.rear = rear;
  return p;
}

}  // namespace

ProfileTable default_profile_table() {
  // Amplitudes chosen so the in-band charging rate (UVLO window, default RC)
  // hits per-class targets: front WALK .040 / SD .110 / SU .115 / RUN .105,
  // rear WALK .078 / SD .086 / SU .100 / RUN .120 V/s. Heel strikes dominate
  // WALK/RUN (rear louder); toe-off piles RUN/SD/SU into one front-axis
  // cluster, while WALK/SD collide on the rear axis, so neither position
  // separates all five classes alone but the pair does.
  ProfileTable t;
  t.at(ActivityLabel::Stationary) = entry(ActivityLabel::Stationary,
                                          {0.0, 0.0, 0.0, 0.5}, {0.0, 0.0, 0.0, 0.5});
  t.at(ActivityLabel::Walk) = entry(ActivityLabel::Walk,
                                    {1.7, 24.7, 0.10, 0.55}, {1.7, 44.1, 0.10, 0.55});
  t.at(ActivityLabel::StairsDown) = entry(ActivityLabel::StairsDown,
                                          {1.8, 66.1, 0.10, 0.50}, {1.8, 52.6, 0.10, 0.50});
  t.at(ActivityLabel::StairsUp) = entry(ActivityLabel::StairsUp,
                                        {1.6, 68.9, 0.10, 0.50}, {1.6, 60.5, 0.10, 0.50});
  t.at(ActivityLabel::Run) = entry(ActivityLabel::Run,
                                   {2.6, 88.9, 0.10, 0.35}, {2.6, 101.0, 0.10, 0.35});
  return t;
}

ProfileTable separable_profile_table() {
  // Rate targets spaced ~0.03 V/s apart per position, no jitter: with the
  // default circuit this yields cleanly separated clusters.
  ProfileTable t;
  t.at(ActivityLabel::Stationary) = entry(ActivityLabel::Stationary,
                                          {0.0, 0.0, 0.0, 0.5}, {0.0, 0.0, 0.0, 0.5});
  t.at(ActivityLabel::Walk) = entry(ActivityLabel::Walk,
                                    {1.7, 21.4, 0.0, 0.5}, {1.7, 24.2, 0.0, 0.5});
  t.at(ActivityLabel::StairsDown) = entry(ActivityLabel::StairsDown,
                                          {1.8, 38.0, 0.0, 0.5}, {1.8, 40.9, 0.0, 0.5});
  t.at(ActivityLabel::StairsUp) = entry(ActivityLabel::StairsUp,
                                        {1.6, 54.9, 0.0, 0.5}, {1.6, 57.7, 0.0, 0.5});
  t.at(ActivityLabel::Run) = entry(ActivityLabel::Run,
                                   {2.6, 71.8, 0.0, 0.5}, {2.6, 74.6, 0.0, 0.5});
  return t;
}

ActivityProfile make_profile(ActivityLabel label, const SubjectParams& subject,
                             const ProfileTable& table) {
  subject.validate();
  ActivityProfile profile = table.at(label);
  for (StrikeParams* p : {&profile.front, &profile.rear}) {
    p->v_s_mean *= subject.intensity_scale;
    p->strike_rate_hz *= subject.cadence_scale;
  }
  profile.validate();
  return profile;
}

SourceSignal generate_source(const ActivityProfile& profile, PehPosition position,
                             double duration_s, double dt_s, std::uint64_t seed) {
  profile.validate();
  if (duration_s < 1.0) throw ConfigError("generate_source: duration must be >= 1 s");
  if (dt_s <= 0.0) throw ConfigError("generate_source: dt must be > 0");

  const StrikeParams& p = profile.at(position);
  const auto n = static_cast<std::size_t>(std::llround(duration_s / dt_s));

  SourceSignal signal;
  signal.dt_s = dt_s;
  signal.position = position;
  signal.v_s.assign(n, 0.0);
  signal.labels.assign(n, profile.label);

  if (p.strike_rate_hz <= 0.0 || p.v_s_mean <= 0.0) return signal;

  Rng rng(seed);
  const double period = 1.0 / p.strike_rate_hz;
  const double width = p.burst_duty * period;
  for (double strike_t = 0.0; strike_t < duration_s; strike_t += period) {
    double amplitude = p.v_s_mean;
    if (p.v_s_jitter_rel > 0.0)
      amplitude *= 1.0 + p.v_s_jitter_rel * rng.truncated_normal(3.0);
    amplitude = std::max(amplitude, 0.0);
    const auto begin = static_cast<std::size_t>(strike_t / dt_s);
    const auto end = std::min(n, static_cast<std::size_t>((strike_t + width) / dt_s));
    for (std::size_t i = begin; i < end; ++i) signal.v_s[i] = amplitude;
  }
  return signal;
}

SessionSignals generate_session(const Schedule& schedule, const SubjectParams& subject,
                                double dt_s, const ProfileTable& table) {
  subject.validate();
  if (schedule.empty()) throw ConfigError("generate_session: schedule must be non-empty");
  for (const auto& [label, duration] : schedule) {
    (void)label;
    if (duration < 5.0)
      throw ConfigError("generate_session: segment durations must be >= 5 s");
  }

  SessionSignals session;
  for (PehPosition position : {PehPosition::Front, PehPosition::Rear}) {
    SourceSignal& out = position == PehPosition::Front ? session.front : session.rear;
    out.dt_s = dt_s;
    out.position = position;
    std::size_t segment_index = 0;
    for (const auto& [label, duration] : schedule) {
      const ActivityProfile profile = make_profile(label, subject, table);
      const std::uint64_t seed = derive_seed(
          derive_seed(subject.rng_seed, segment_index),
          position == PehPosition::Front ? "front" : "rear");
      SourceSignal segment = generate_source(profile, position, duration, dt_s, seed);
      out.v_s.insert(out.v_s.end(), segment.v_s.begin(), segment.v_s.end());
      out.labels.insert(out.labels.end(), segment.labels.begin(), segment.labels.end());
      ++segment_index;
    }
    out.validate();
  }
  return session;
}

}  // namespace capsim::activity
