#ifndef RCMATCH_RNG_HPP
#define RCMATCH_RNG_HPP

#include <cstdint>

namespace rcmatch {

// splitmix64; fixed algorithm so seeded results are identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(unsigned long long seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Rejection sampling over the top multiple of bound.
    std::uint64_t limit = ~0ULL - (~0ULL % bound + 1) % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x > limit);
    return x % bound;
  }

  // Uniform in [lo, hi] inclusive.
  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace rcmatch

#endif  // RCMATCH_RNG_HPP
