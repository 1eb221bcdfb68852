#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace quddpm {

/// Seeded random source with named, reproducible substreams.
///
/// Every stream is identified by a 64-bit key. Child streams derive their key
/// from the parent key and a name (plus an optional index), so a single
/// master seed fans out into independent streams such as
/// `diffusion/sample/17/step/3` whose values do not depend on the order in
/// which other streams were consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  [[nodiscard]] RandomStream substream(std::string_view name) const;
  [[nodiscard]] RandomStream substream(std::string_view name, std::uint64_t index) const;

  [[nodiscard]] std::uint64_t key() const { return key_; }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view text);

}  // namespace quddpm
