#pragma once

#include <cstddef>
#include <vector>

#include "capsim/errors.hpp"
#include "capsim/labels.hpp"

namespace capsim::activity {

// Piecewise-constant effective charging-source voltage for one harvester,
// labeled per step with the activity that produced it. Single-activity
// signals carry a constant label track; sessions concatenate segments.
struct SourceSignal {
  double dt_s = 0.0;
  PehPosition position = PehPosition::Front;
  std::vector<double> v_s;
  std::vector<ActivityLabel> labels;

  std::size_t steps() const { return v_s.size(); }
  double duration_s() const { return dt_s * static_cast<double>(v_s.size()); }

  void validate() const {
    if (dt_s <= 0.0) throw ConfigError("SourceSignal: dt must be > 0");
    if (v_s.empty()) throw ConfigError("SourceSignal: empty signal");
    if (labels.size() != v_s.size())
      throw ConfigError("SourceSignal: labels length must equal signal length");
    for (double v : v_s)
      if (v < 0.0) throw ConfigError("SourceSignal: source voltage must be >= 0");
  }
};

}  // namespace capsim::activity
