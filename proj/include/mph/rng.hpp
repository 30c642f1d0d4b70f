#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

namespace mph {

// splitmix64 step; used to derive independent per-item seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = root;
  splitmix64(s);
  s += a;
  splitmix64(s);
  s += b;
  return splitmix64(s);
}

// Seeded generator with explicit transforms. std::mt19937_64 is fully specified
// by the standard; the standard *distributions* are not, so uniform/gauss are
// written out here to keep results identical across platforms and library
// versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform double in [0, 1), 53 random bits
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // unbiased integer in [0, n), masked rejection
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(n - 1);
    std::uint64_t x;
    do {
      x = gen_() & mask;
    } while (x >= n);
    return x;
  }

  // standard normal via Box-Muller; consumes exactly two uniforms per call
  double gauss() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::mt19937_64& engine() { return gen_; }

  friend std::ostream& operator<<(std::ostream& os, const Rng& r) { return os << r.gen_; }
  friend std::istream& operator>>(std::istream& is, Rng& r) { return is >> r.gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mph
