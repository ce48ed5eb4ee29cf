#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC'11).
// Every draw is a pure function of (key, counter); the field generator keys a
// stream per lattice site so that a sample depends only on (seed, i, x), never
// on evaluation order or thread schedule.

#include <array>
#include <cstdint>
#include <cmath>

namespace polymerlab::rng {

using Block = std::array<uint32_t, 4>;

struct Key {
  uint32_t k0 = 0, k1 = 0;
};

inline Block philox4x32(Block ctr, Key key) {
  constexpr uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kM0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kM1) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key.k0, lo1, hi0 ^ ctr[3] ^ key.k1, lo0};
    key.k0 += kW0;
    key.k1 += kW1;
  }
  return ctr;
}

// A stream of variates addressed by (seed, three prefix words); the fourth
// counter word indexes blocks within the stream.
class Stream {
 public:
  Stream(uint64_t seed, uint32_t c0, uint32_t c1, uint32_t c2)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        prefix_{c0, c1, c2} {}

  uint32_t u32() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  uint64_t u64() {
    const uint64_t hi = u32();
    return (hi << 32) | u32();
  }

  // uniform on (0,1), 53-bit resolution, never returns an endpoint
  double u01() { return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(u01()); }

  // Box-Muller; one variate per call
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(u01()));
    const double a = 2.0 * 3.14159265358979323846 * u01();
    return r * std::cos(a);
  }

  // arrival counting; fine for the O(1) rates used here
  long poisson(double rate) {
    double acc = 0.0;
    long k = -1;
    do {
      acc += exponential();
      ++k;
    } while (acc < rate);
    return k;
  }

  // Marsaglia-Tsang
  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      const double boost = std::pow(u01(), 1.0 / shape);
      return gamma(shape + 1.0, scale) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = u01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

 private:
  void refill() {
    buf_ = philox4x32({prefix_[0], prefix_[1], prefix_[2], block_++}, key_);
    have_ = 4;
  }

  Key key_;
  std::array<uint32_t, 3> prefix_;
  uint32_t block_ = 0;
  Block buf_{};
  int have_ = 0;
};

// stream feeding the environment value at lattice site (i, x)
inline Stream site_stream(uint64_t seed, int i, int x) {
  return Stream(seed, static_cast<uint32_t>(i), static_cast<uint32_t>(x), 0x51745EEDu);
}

// stream for auxiliary draws (sampler self-tests etc.)
inline Stream tagged_stream(uint64_t seed, uint32_t tag, uint32_t idx) {
  return Stream(seed, tag, idx, 0xA0C11A7Eu);
}

// per-replicate seed derived from the master seed; pure in (master, r)
inline uint64_t replicate_seed(uint64_t master, uint32_t r) {
  const Block b = philox4x32({r, 0x5EEDu, 0, 0},
                             {static_cast<uint32_t>(master), static_cast<uint32_t>(master >> 32)});
  return (static_cast<uint64_t>(b[0]) << 32) | b[1];
}

}  // namespace polymerlab::rng
