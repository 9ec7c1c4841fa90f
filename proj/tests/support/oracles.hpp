#pragma once

// Independent reference implementations used to freeze expected values.
// Everything here is deliberately brute-force and separate from the library
// code paths it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "capsim/activity.hpp"
#include "capsim/labels.hpp"

namespace oracles {

// Bisection root-find of f(t) = target on [lo, hi]; f must be monotone.
inline double bisect(const std::function<double(double)>& f, double target, double lo,
                     double hi, double tol = 1e-9) {
  double flo = f(lo) - target;
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid) - target;
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Exponential self-discharge through a parallel resistance only.
inline double leak_decay(double v0, double t_s, double leak_resistance_ohm,
                         double capacitance_f) {
  return v0 * std::exp(-t_s / (leak_resistance_ohm * capacitance_f));
}

// Exhaustive k-nearest-neighbor vote with the fixed tie-break order:
// neighbors sorted by (distance, index), label ties toward the lower label.
inline capsim::ActivityLabel brute_force_knn(const std::vector<std::array<double, 2>>& points,
                                             const std::vector<capsim::ActivityLabel>& labels,
                                             std::array<double, 2> query, int dim, int k) {
  std::vector<std::pair<double, std::size_t>> order(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = 0.0;
    for (int f = 0; f < dim; ++f) {
      const double delta = points[i][f] - query[f];
      d += delta * delta;
    }
    order[i] = {d, i};
  }
  std::sort(order.begin(), order.end());
  std::array<std::uint64_t, capsim::kNumActivityLabels> votes{};
  for (int i = 0; i < k && i < static_cast<int>(order.size()); ++i)
    ++votes[capsim::label_index(labels[order[i].second])];
  int best = 0;
  for (int c = 1; c < capsim::kNumActivityLabels; ++c)
    if (votes[c] > votes[best]) best = c;
  return static_cast<capsim::ActivityLabel>(best);
}

// Constant-source signal for driving the integrator directly.
inline capsim::activity::SourceSignal constant_signal(
    double v_s, double duration_s, double dt_s,
    capsim::ActivityLabel label = capsim::ActivityLabel::Walk) {
  capsim::activity::SourceSignal signal;
  signal.dt_s = dt_s;
  const auto n = static_cast<std::size_t>(std::llround(duration_s / dt_s));
  signal.v_s.assign(n, v_s);
  signal.labels.assign(n, label);
  return signal;
}

}  // namespace oracles
