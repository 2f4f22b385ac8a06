#pragma once

#include <optional>
#include <vector>

#include "pada/common.hpp"

namespace pada {

// One sparsely observed curve: times ascending in [0,1], same length values.
struct SampledCurve {
  std::vector<double> times;
  std::vector<double> values;

  int size() const { return int(times.size()); }
  void validate() const;
};

// Panel of curves, curve index is the time-series index j = 1..J.
struct FtsDataset {
  std::vector<SampledCurve> curves;
  std::optional<double> noise_variance;  // known sigma^2 when available

  int curve_count() const { return int(curves.size()); }
  long observation_count() const;
  void validate() const;
};

}  // namespace pada
