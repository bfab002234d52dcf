#pragma once

#include <cstdint>

namespace sosie {

// splitmix64: portable, seedable, and cheap. The engine never depends on
// std distributions so that draws are identical across standard libraries.
struct Rng {
  uint64_t state = 0;

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // unbiased draw in [0, n)
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }
};

inline Rng make_rng(uint64_t seed) {
  Rng rng{seed};
  rng.next();
  return rng;
}

// Independent substream for one trial; trials can then run in any order or
// in parallel with identical results.
inline Rng trial_rng(uint64_t seed, uint64_t index) {
  Rng mixer{seed ^ (0xD1B54A32D192ED03ULL * (index + 1))};
  mixer.next();
  return Rng{mixer.next()};
}

}  // namespace sosie
