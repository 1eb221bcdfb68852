#include "quddpm/random.hpp"

namespace quddpm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t seed) : key_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::substream(std::string_view name) const {
  return RandomStream(splitmix64(key_ ^ fnv1a(name)));
}

RandomStream RandomStream::substream(std::string_view name, std::uint64_t index) const {
  return RandomStream(splitmix64(splitmix64(key_ ^ fnv1a(name)) + index));
}

double RandomStream::uniform() {
  // 53 random mantissa bits; avoids libstdc++'s generate_canonical edge case at 1.0.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomStream::normal() { return normal_(engine_); }

std::uint64_t RandomStream::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace quddpm
