#pragma once

#include <cstdint>
#include <string_view>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace rs {

// splitmix64 finalizer. Bijective on 64-bit words; used to decorrelate
// structured (master, path, row) triples before seeding.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent substream seed for (path, row) under one master seed. Each time
// row of each Monte Carlo path gets its own generator, so paths can be
// scheduled on any worker in any order without changing a single draw.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t path,
                                       std::uint64_t row) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ (path + 0x8536a5b95e24c1d1ULL));
  s = mix64(s ^ (row + 0x2545f4914f6cdd1dULL));
  return s;
}

// FNV-1a, used for config hashes and output checksums.
constexpr std::uint64_t fnv1a64(const void* data, std::size_t n,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64(s.data(), s.size());
}

// Stream of standard normals. boost::random::mt19937_64 consumes the full
// 64-bit seed (std::seed_seq-free path), and boost's normal_distribution is a
// ziggurat, so this is both collision-safe across ~1e7 substreams and fast.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

  void reseed(std::uint64_t seed) {
    gen_.seed(seed);
    normal_.reset();
  }

  double operator()() { return normal_(gen_); }

  std::uint64_t raw() { return gen_(); }

 private:
  boost::random::mt19937_64 gen_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace rs
