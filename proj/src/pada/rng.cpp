#include "pada/rng.hpp"

#include <algorithm>
#include <cmath>

#include "pada/common.hpp"

namespace pada {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& c, uint32_t k0, uint32_t k1) {
  uint64_t p0 = uint64_t(kPhiloxM0) * c[0];
  uint64_t p1 = uint64_t(kPhiloxM1) * c[2];
  uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(uint64_t seed, uint64_t stream,
                                   uint64_t counter) {
  std::array<uint32_t, 4> c = {
      uint32_t(counter), uint32_t(counter >> 32),
      uint32_t(stream), uint32_t(stream >> 32)};
  uint32_t k0 = uint32_t(seed);
  uint32_t k1 = uint32_t(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

uint32_t RngStream::next_u32() {
  if (pos_ == 4) {
    buf_ = philox4x32(seed_, stream_, counter_++);
    pos_ = 0;
  }
  return buf_[pos_++];
}

uint64_t RngStream::next_u64() {
  uint64_t hi = next_u32();
  uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::next_double() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0,1]; log(0) guarded by construction
  double u1 = (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = next_double();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = kTwoPi * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

uint64_t RngStream::next_below(uint64_t n) {
  require(n > 0, ErrorCode::invalid_argument, "next_below: n must be positive");
  if (n == 1) return 0;
  // rejection against the largest multiple of n below 2^64
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    uint64_t v = next_u64();
    if (v < limit) return v % n;
  }
}

std::vector<int> RngStream::sample_without_replacement(int n, int k) {
  require(n >= 1 && k >= 1 && k <= n, ErrorCode::invalid_argument,
          "sample_without_replacement: need 1 <= k <= n");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + int(next_below(uint64_t(n - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pada
