#ifndef UPIMH_RNG_HPP
#define UPIMH_RNG_HPP

#include <cstdint>
#include <random>

namespace upimh {

// Per-thread / per-replicate random source. Every sampler in the library
// takes an Rng& explicitly; nothing draws from hidden global state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (master seed, stream index). Streams
  // with distinct indices are decorrelated by a splitmix64 scramble of the
  // seed material before it reaches the generator.
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_index);

  // Uniform on [0,1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  double normal();  // standard normal
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // rate > 0
  double exponential(double rate);

  long poisson(double mean);

  // shape > 0, rate > 0
  double gamma(double shape, double rate);

  // integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

// Deterministic 64-bit mix, used to partition a master seed into
// namespaces (data generation, replicate farm, pilot runs, ...).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag);

}  // namespace upimh

#endif
