#include "lpsim/rng.h"

#include "lpsim/error.h"

namespace lpsim {

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw ParameterError("range", "empty integer range");
  const std::uint64_t span =
      static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  // Largest multiple of span that fits; draws above it are rejected.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view scene_id,
                          std::uint64_t variant) {
  std::uint64_t h = mix64(master_seed);
  for (unsigned char c : scene_id) h = mix64(h ^ c);
  h = mix64(h ^ 0xffULL);
  return mix64(h ^ variant);
}

}  // namespace lpsim
