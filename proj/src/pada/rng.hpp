#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace pada {

// Counter-based Philox4x32-10 generator. Outputs depend only on
// (seed, stream, counter), which keeps simulation replicates and parallel
// work bit-reproducible regardless of scheduling.
std::array<uint32_t, 4> philox4x32(uint64_t seed, uint64_t stream,
                                   uint64_t counter);

// Sequential view over one stream. Draw order is part of the contract:
// changing it changes every dependent artifact.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream)
      : seed_(seed), stream_(stream), counter_(0), pos_(4) {}

  uint32_t next_u32();
  uint64_t next_u64();
  // uniform on [0,1)
  double next_double();
  // standard normal via Box-Muller, one cached value
  double next_normal();
  // uniform on {0,...,n-1}, unbiased
  uint64_t next_below(uint64_t n);
  // k distinct values from {0,...,n-1}, ascending
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  uint64_t seed_, stream_, counter_;
  std::array<uint32_t, 4> buf_{};
  int pos_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace pada
