#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace elh {

/// MT19937-64 (Matsumoto-Nishimura, 64-bit) seeded through the standard
/// single-integer seeding rule. Doubles are taken from the top 53 bits so any
/// implementation of the published generator reproduces the same stream.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";
  static constexpr const char* kSeeding = "std-seed(seed)";
  static constexpr const char* kDoubleRule = "(x>>11)*2^-53";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

  static std::string describe(std::uint64_t seed) {
    return std::string(kAlgorithm) + " seed=" + std::to_string(seed) + " seeding=" + kSeeding +
           " doubles=" + kDoubleRule;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace elh
