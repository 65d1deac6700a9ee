#ifndef LPSIM_RNG_H_
#define LPSIM_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace lpsim {

// Seeded generator with platform-independent draws. std::mt19937_64 output
// is fully specified by the standard; the distributions below are written
// out explicitly because the standard library's are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], unbiased by rejection.
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stable seed for variant `variant` of scene `scene_id` under `master_seed`:
// h = mix64(master); h = mix64(h ^ byte) for each byte of the id;
// h = mix64(h ^ 0xff); h = mix64(h ^ variant).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view scene_id,
                          std::uint64_t variant);

}  // namespace lpsim

#endif  // LPSIM_RNG_H_
