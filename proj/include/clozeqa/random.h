#ifndef CLOZEQA_RANDOM_H_
#define CLOZEQA_RANDOM_H_

#include <cstdint>
#include <string_view>

namespace clozeqa {

// SplitMix64. Fixed so that splits and random spans can be regenerated
// bit-for-bit by any other implementation of the same generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // next() % bound. The modulo bias is below 2^-40 for any bound we use and
  // keeps the draw trivially portable. bound must be positive.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

// 64-bit FNV-1a, used to derive per-example seeds from ids.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace clozeqa

#endif  // CLOZEQA_RANDOM_H_
