#include "swarmform/rng.hpp"

#include <cmath>
#include <limits>

namespace swarmform {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::for_stream(std::uint64_t run_seed, std::uint64_t iteration, Stream stream) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(run_seed) ^ iteration) ^
                                     static_cast<std::uint64_t>(stream));
  return Rng(h);
}

double Rng::symmetric(double half_range) {
  while (true) {
    const std::uint64_t k = next() >> 11;
    if (k == 0) {
      continue;
    }
    // 2u - 1 is exact for u = k / 2^53 and lies in (-1, 1).
    const double unit = static_cast<double>(k) * 0x1.0p-52 - 1.0;
    const double v = half_range * unit;
    if (std::abs(v) < half_range) {
      return v;
    }
  }
}

std::size_t Rng::index(std::size_t n) {
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = next();
  while (v >= limit) {
    v = next();
  }
  return static_cast<std::size_t>(v % range);
}

}  // namespace swarmform
