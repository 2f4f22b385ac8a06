#include "pada/dataset.hpp"

namespace pada {

void SampledCurve::validate() const {
  require(times.size() == values.size(), ErrorCode::dimension_mismatch,
          "SampledCurve: times and values differ in length");
  require(!times.empty(), ErrorCode::invalid_argument,
          "SampledCurve: curve has no observations");
  for (size_t z = 0; z < times.size(); ++z) {
    require(times[z] >= 0.0 && times[z] <= 1.0, ErrorCode::invalid_argument,
            "SampledCurve: observation time outside [0,1]");
    if (z > 0)
      require(times[z] >= times[z - 1], ErrorCode::invalid_argument,
              "SampledCurve: times must be ascending");
  }
}

long FtsDataset::observation_count() const {
  long n = 0;
  for (const auto& c : curves) n += c.size();
  return n;
}

void FtsDataset::validate() const {
  require(!curves.empty(), ErrorCode::invalid_argument,
          "FtsDataset: no curves");
  for (const auto& c : curves) c.validate();
  if (noise_variance)
    require(*noise_variance >= 0.0, ErrorCode::invalid_argument,
            "FtsDataset: negative noise variance");
}

}  // namespace pada
