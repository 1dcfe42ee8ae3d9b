#ifndef SDDELAN_RNG_HPP
#define SDDELAN_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sddelan {

/// Philox4x32-10 counter-based generator (Salmon et al.).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of replicate i, independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Standard normals addressed by (seed, stream, index). One Box-Muller
/// pair per Philox block; draw k of a stream always sees the same bits.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  double next() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

  std::uint64_t blocks_used() const { return block_; }

 private:
  static double unit_open(std::uint32_t hi, std::uint32_t lo) {
    // 53-bit uniform on (0, 1)
    const std::uint64_t bits = (std::uint64_t{hi} << 21) | (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
  }

  void refill() {
    const Philox4x32::Counter out = Philox4x32::block(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_, 0u}, key_);
    ++block_;
    const double rad = std::sqrt(-2.0 * std::log(unit_open(out[0], out[1])));
    const double ang = 2.0 * std::numbers::pi * unit_open(out[2], out[3]);
    buf_ = {rad * std::cos(ang), rad * std::sin(ang)};
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t stream_;
  std::uint64_t block_ = 0;
  std::array<double, 2> buf_{};
  int pos_ = 2;
};

}  // namespace sddelan

#endif  // SDDELAN_RNG_HPP
