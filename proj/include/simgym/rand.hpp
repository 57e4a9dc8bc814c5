#pragma once

#include <cstdint>
#include <string_view>

namespace simgym {

// All randomness in the project flows through this generator so that runs are
// reproducible bit-for-bit across platforms and standard libraries. splitmix64
// is small, fast, and fully specified by its seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). n must be > 0.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
  }

private:
  std::uint64_t state_;
};

namespace detail {
inline void fnv_absorb(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

inline void seed_absorb(std::uint64_t& h, std::uint64_t v) {
  fnv_absorb(h, &v, sizeof(v));
}

inline void seed_absorb(std::uint64_t& h, std::string_view s) {
  fnv_absorb(h, s.data(), s.size());
  seed_absorb(h, static_cast<std::uint64_t>(s.size()));
}
} // namespace detail

// Stable 64-bit hash of heterogeneous parts (integers and strings), used to
// derive per-session and per-replicate seeds from one master seed.
template <typename... Parts>
std::uint64_t derive_seed(Parts&&... parts) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  (detail::seed_absorb(h, parts), ...);
  // final avalanche so low-entropy inputs spread over all bits
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

} // namespace simgym
