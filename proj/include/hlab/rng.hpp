#ifndef HLAB_RNG_HPP
#define HLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace hlab {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Deterministic per-stream generator: stream k of seed s is independent of
// how other streams are consumed, so stratified engines stay reproducible
// regardless of evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(detail::splitmix64(detail::splitmix64(seed) ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL))) {}

  double uniform() { return unit_(eng_); }
  double uniform(double a, double b) { return a + (b - a) * unit_(eng_); }
  std::uint64_t bits() { return eng_(); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace hlab

#endif  // HLAB_RNG_HPP
