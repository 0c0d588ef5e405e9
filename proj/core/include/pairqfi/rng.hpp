#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pairqfi {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// The 128-bit counter is split as (block_lo, block_hi, stream_lo, stream_hi)
/// and the 64-bit key is the user seed, so (seed, stream) pairs address
/// statistically independent substreams regardless of the order in which they
/// are consumed. This is what makes the Monte-Carlo harness reproducible
/// across thread counts: every (draw, frame) owns its own stream.
///
/// Satisfies uniform_random_bit_generator, so it plugs into the standard
/// <random> distributions.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  Philox4x32() : Philox4x32(0, 0) {}
  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (buf_pos_ == 2) {
      const std::array<std::uint32_t, 4> out = block(
          {static_cast<std::uint32_t>(block_index_),
           static_cast<std::uint32_t>(block_index_ >> 32),
           static_cast<std::uint32_t>(stream_),
           static_cast<std::uint32_t>(stream_ >> 32)},
          key_);
      buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
      buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
      buf_pos_ = 0;
      ++block_index_;
    }
    return buf_[buf_pos_++];
  }

  /// One 10-round Philox4x32 bijection of a counter block. Exposed so the
  /// implementation can be checked against the published test vectors.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t prod0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t prod1 = 0xCD9E8D57ull * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(prod0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(prod0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(prod1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(prod1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int buf_pos_ = 2;
};

/// Stream used by the frame at (draw, frame) of a simulation run.
inline Philox4x32 frame_stream(std::uint64_t seed, std::uint32_t draw,
                               std::uint32_t frame) {
  return Philox4x32(seed, (static_cast<std::uint64_t>(draw) << 32) | frame);
}

/// Stream used for the centroid draw of a given draw index. Frame index
/// 0xFFFFFFFF is reserved for this purpose.
inline Philox4x32 centroid_stream(std::uint64_t seed, std::uint32_t draw) {
  return frame_stream(seed, draw, 0xFFFFFFFFu);
}

/// Uniform double in [lo, hi).
inline double uniform_double(Philox4x32& rng, double lo, double hi) {
  const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u01;
}

}  // namespace pairqfi
