#ifndef MCS_RNG_HPP
#define MCS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace mcs {

// splitmix64; used to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for (base, stream, index), e.g. one simulation instance inside one
// grid point of a sweep.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(base + 0x632be59bd9b4e019ull * (stream + 1)) +
                    0x9e3779b97f4a7c15ull * (index + 1));
}

// mt19937_64 with hand-rolled distributions. The engine's output sequence is
// fixed by the standard; std::uniform_real_distribution and friends are not,
// so we implement the few draws we need to keep traces identical across
// platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Fixed-point multiply; bias is O(n / 2^64).
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Exponential with the given mean, strictly positive draws.
  double exponential(double mean) {
    double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return -mean * std::log(u);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mcs

#endif  // MCS_RNG_HPP
