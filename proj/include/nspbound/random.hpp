#pragma once

// Counter-based Philox4x64-10 generator and a Box-Muller Gaussian source.
//
// Stream layout: the 128-bit key is (seed, stream). Monte Carlo trial i uses
// stream i, so any trial can be regenerated on any thread without touching
// the others. Within a stream, counter word 0 is the block index and word 1
// a caller-chosen sub-stream (used for rank-deficiency resampling attempts).

#include <array>
#include <cstdint>
#include <limits>

namespace nspbound::random {

using Block = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

/// One Philox4x64 block with 10 rounds.
Block philox4x64_10(Block counter, Key key);

class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();

 private:
  Key key_;
  Block counter_{};
  Block buffer_{};
  int next_ = 4;
};

/// Standard normal variates via Box-Muller; pairs are cached.
class Gaussian {
 public:
  explicit Gaussian(Philox engine) : engine_(engine) {}
  double operator()();

 private:
  Philox engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nspbound::random
