#ifndef MCROUTE_RNG_HPP
#define MCROUTE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace mcroute {

// splitmix64, used only to derive well-spread stream seeds from a base seed
// and a stream tag.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_stream_seed(uint64_t base, uint64_t kind, uint64_t a,
                                   uint64_t b = 0) {
  uint64_t s = splitmix64(base ^ (kind * 0xd6e8feb86659fd93ULL));
  s = splitmix64(s ^ (a * 0xa0761d6478bd642fULL));
  s = splitmix64(s ^ (b * 0xe7037ed1a0b428dbULL));
  return s;
}

// Seedable stream of uniforms and exponentials. Draws are generated by
// inverse CDF on top of mt19937_64 so that results do not depend on the
// standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    // 1 - uniform01() lies in (0, 1], so the log argument is never zero.
    return -std::log(1.0 - uniform01()) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mcroute

#endif  // MCROUTE_RNG_HPP
