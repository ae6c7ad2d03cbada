#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace swarmform {

// Independent draw sequences inside one run. Each (iteration, stream) pair
// gets its own generator so a change in one operator's draw count leaves
// every other operator's draws untouched.
enum class Stream : std::uint64_t {
  init = 1,
  resample = 2,
  alter = 3,
  interior = 4,
  perturb = 5,
  fresh = 6,
};

// mt19937_64 with hand-rolled conversions: the std distributions are
// implementation-defined, which would make runs differ across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t run_seed, std::uint64_t iteration, Stream stream);

  std::uint64_t next() { return engine_(); }

  // [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Open interval (-half_range, half_range).
  double symmetric(double half_range);

  // Uniform in [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased index in [0, n); n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace swarmform
