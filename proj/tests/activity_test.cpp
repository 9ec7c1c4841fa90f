#include <doctest.h>

#include <cmath>

#include "capsim/activity.hpp"
#include "capsim/circuit.hpp"
#include "capsim/errors.hpp"
#include "capsim/sampler.hpp"
#include "support/oracles.hpp"

using namespace capsim;
using namespace capsim::activity;

namespace {

SubjectParams subject(double intensity = 1.0, double cadence = 1.0, std::uint64_t seed = 7) {
  return {"test", intensity, cadence, seed};
}

std::size_t count_bursts(const SourceSignal& signal) {
  std::size_t bursts = 0;
  bool on = false;
  for (double v : signal.v_s) {
    if (v > 0.0 && !on) ++bursts;
    on = v > 0.0;
  }
  return bursts;
}

}  // namespace

TEST_CASE("stationary profile generates essentially no source") {
  const ActivityProfile profile = make_profile(ActivityLabel::Stationary, subject());
  CHECK(profile.front.v_s_mean == doctest::Approx(0.0));
  CHECK(profile.rear.v_s_mean == doctest::Approx(0.0));
}

TEST_CASE("running is more intense than walking at both positions") {
  const ActivityProfile walk = make_profile(ActivityLabel::Walk, subject());
  const ActivityProfile run = make_profile(ActivityLabel::Run, subject());
  CHECK(run.front.v_s_mean > walk.front.v_s_mean);
  CHECK(run.rear.v_s_mean > walk.rear.v_s_mean);
}

TEST_CASE("per-position intensity ordering follows WALK < SD < SU < RUN") {
  const ProfileTable table = default_profile_table();
  for (PehPosition position : {PehPosition::Front, PehPosition::Rear}) {
    const double walk = table.at(ActivityLabel::Walk).at(position).v_s_mean;
    const double sd = table.at(ActivityLabel::StairsDown).at(position).v_s_mean;
    const double su = table.at(ActivityLabel::StairsUp).at(position).v_s_mean;
    const double run = table.at(ActivityLabel::Run).at(position).v_s_mean;
    CHECK(walk < sd);
    CHECK(sd < su);
    CHECK(su < run);
  }
}

TEST_CASE("doubling the intensity scale doubles every burst amplitude exactly") {
  for (ActivityLabel label : kAllActivityLabels) {
    const ActivityProfile base = make_profile(label, subject(1.0));
    const ActivityProfile scaled = make_profile(label, subject(2.0));
    CHECK(scaled.front.v_s_mean == doctest::Approx(2.0 * base.front.v_s_mean));
    CHECK(scaled.rear.v_s_mean == doctest::Approx(2.0 * base.rear.v_s_mean));
  }
}

TEST_CASE("subject scales outside [0.5, 2] are rejected") {
  CHECK_THROWS_AS(make_profile(ActivityLabel::Walk, subject(0.3)), ConfigError);
  CHECK_THROWS_AS(make_profile(ActivityLabel::Walk, subject(1.0, 2.5)), ConfigError);
}

TEST_CASE("generate_source: stationary series is all zero") {
  const ActivityProfile profile = make_profile(ActivityLabel::Stationary, subject());
  const SourceSignal signal = generate_source(profile, PehPosition::Front, 10.0, 0.001, 1);
  for (double v : signal.v_s) REQUIRE(v == 0.0);
}

TEST_CASE("generate_source: 1 Hz strikes over 10 s give 10 bursts, give or take one") {
  ActivityProfile profile = make_profile(ActivityLabel::Walk, subject());
  profile.front.strike_rate_hz = 1.0;
  const SourceSignal signal = generate_source(profile, PehPosition::Front, 10.0, 0.001, 1);
  const std::size_t bursts = count_bursts(signal);
  CHECK(bursts >= 9);
  CHECK(bursts <= 11);
}

TEST_CASE("generate_source is deterministic per seed and varies across seeds") {
  const ActivityProfile profile = make_profile(ActivityLabel::Run, subject());
  const SourceSignal a = generate_source(profile, PehPosition::Rear, 12.0, 0.001, 42);
  const SourceSignal b = generate_source(profile, PehPosition::Rear, 12.0, 0.001, 42);
  const SourceSignal c = generate_source(profile, PehPosition::Rear, 12.0, 0.001, 43);
  CHECK(a.v_s == b.v_s);
  CHECK(a.v_s != c.v_s);  // amplitude jitter differs
}

TEST_CASE("zero jitter bursts carry exactly the configured amplitude") {
  ActivityProfile profile = make_profile(ActivityLabel::Walk, subject());
  profile.front.v_s_jitter_rel = 0.0;
  const SourceSignal signal = generate_source(profile, PehPosition::Front, 10.0, 0.001, 5);
  for (double v : signal.v_s)
    REQUIRE((v == 0.0 || v == doctest::Approx(profile.front.v_s_mean)));
}

TEST_CASE("generate_session labels partition time exactly per the schedule") {
  const Schedule schedule = {{ActivityLabel::Walk, 20.0},
                             {ActivityLabel::StairsUp, 8.0},
                             {ActivityLabel::StairsDown, 8.0},
                             {ActivityLabel::Stationary, 6.0}};
  const SessionSignals session = generate_session(schedule, subject(), 0.001);
  REQUIRE(session.front.steps() == 42000);
  REQUIRE(session.rear.steps() == 42000);

  std::size_t offset = 0;
  for (const auto& [label, duration] : schedule) {
    const auto steps = static_cast<std::size_t>(std::llround(duration / 0.001));
    for (std::size_t i = offset; i < offset + steps; ++i) {
      REQUIRE(session.front.labels[i] == label);
      REQUIRE(session.rear.labels[i] == label);
    }
    offset += steps;
  }
}

TEST_CASE("generate_session rejects segments shorter than 5 s") {
  CHECK_THROWS_AS(generate_session({{ActivityLabel::Walk, 4.0}}, subject(), 0.001), ConfigError);
  CHECK_THROWS_AS(generate_session({}, subject(), 0.001), ConfigError);
}

TEST_CASE("front and rear share strike times but draw independent amplitudes") {
  const Schedule schedule = {{ActivityLabel::Run, 15.0}};
  const SessionSignals session = generate_session(schedule, subject(), 0.001);

  bool amplitudes_differ = false;
  for (std::size_t i = 0; i < session.front.steps(); ++i) {
    const bool front_on = session.front.v_s[i] > 0.0;
    const bool rear_on = session.rear.v_s[i] > 0.0;
    REQUIRE(front_on == rear_on);  // same gait, same contact windows
    if (front_on && session.front.v_s[i] != session.rear.v_s[i]) amplitudes_differ = true;
  }
  CHECK(amplitudes_differ);
}

TEST_CASE("session generation is reproducible from the subject seed") {
  const Schedule schedule = {{ActivityLabel::Walk, 10.0}, {ActivityLabel::Run, 10.0}};
  const SessionSignals a = generate_session(schedule, subject(1.0, 1.0, 99), 0.001);
  const SessionSignals b = generate_session(schedule, subject(1.0, 1.0, 99), 0.001);
  CHECK(a.front.v_s == b.front.v_s);
  CHECK(a.rear.v_s == b.rear.v_s);
}

TEST_CASE("stairs-up front rate lands in the 0.1 to 0.16 V/s design band") {
  // end-to-end: default profile -> source -> capacitor -> sparse windows
  const ActivityProfile profile = make_profile(ActivityLabel::StairsUp, subject(1.0, 1.0, 3));
  const SourceSignal signal = generate_source(profile, PehPosition::Front, 400.0, 0.001, 3);
  auto trace =
      circuit::simulate_trace(signal, circuit::CapacitorSpec{}, circuit::BuckSpec{}, 0.001, 3.2);

  sampler::SamplerConfig cfg;
  cfg.t_c_s = 6.0;
  const auto rates = sampler::estimate_rates(sampler::sparse_sample(trace, cfg), cfg,
                                             PehPosition::Front);
  REQUIRE(rates.size() > 10);
  double mean = 0.0;
  for (const auto& r : rates) mean += r.r_vps;
  mean /= static_cast<double>(rates.size());
  CHECK(mean > 0.1);
  CHECK(mean < 0.16);
}

TEST_CASE("a stationary session decays at the leak rate only") {
  const Schedule schedule = {{ActivityLabel::Stationary, 20.0}};
  const SessionSignals session = generate_session(schedule, subject(), 0.001);
  const auto trace = circuit::simulate_trace(session.front, circuit::CapacitorSpec{},
                                             circuit::BuckSpec{}, 0.001, 3.5);
  // compare against the pure self-discharge oracle
  const double expected = oracles::leak_decay(3.5, 20.0, 5.177e6, 470e-6);
  CHECK(trace.samples.back() == doctest::Approx(expected).epsilon(1e-6));
  // observed rate is about -1.4 mV/s: far below any active class
  const double rate = (trace.samples.back() - trace.samples.front()) / 20.0;
  CHECK(rate < 0.0);
  CHECK(rate > -0.01);
}
