#include "upimh/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace upimh {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::mt19937_64 make_generator(std::uint64_t seed_material) {
  // Warm the Mersenne state with four scrambled words instead of the raw
  // seed; nearby seeds then start from unrelated states.
  std::uint64_t s = seed_material;
  std::uint64_t w0 = splitmix64(s), w1 = splitmix64(s), w2 = splitmix64(s),
                w3 = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                    static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
                    static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
                    static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : gen_(make_generator(seed)) {}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  std::uint64_t s = master_seed ^ (tag * 0xD2B74407B1CE6E93ull + 0x8BB84B93962EACC9ull);
  return splitmix64(s);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return Rng(derive_seed(master_seed, stream_index));
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return std_normal_(gen_); }

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  // 1 - uniform() lies in (0,1], so the log never sees zero.
  return -std::log(1.0 - uniform()) / rate;
}

long Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  std::poisson_distribution<long> dist(mean);
  return dist(gen_);
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma: shape and rate must be > 0");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(gen_);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(gen_);
}

}  // namespace upimh
