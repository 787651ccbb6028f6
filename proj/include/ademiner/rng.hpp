#pragma once

#include <cstdint>
#include <vector>

namespace ade {

// pcg32 (PCG-XSH-RR 64/32, O'Neill). Fixed algorithm so seeded runs are
// reproducible across platforms and implementations; std engines are not
// pinned down enough for that.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // Unbiased draw in [0, bound) by rejection.
  std::uint32_t bounded(std::uint32_t bound) {
    std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      std::uint32_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  std::uint64_t next64() {
    std::uint64_t hi = next();
    return (hi << 32) | next();
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = bounded(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  static constexpr std::uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL;

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace ade
