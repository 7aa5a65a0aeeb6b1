#include "nspbound/random.hpp"

#include <cmath>
#include <numbers>

namespace nspbound::random {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(prod >> 64);
  lo = static_cast<std::uint64_t>(prod);
}

}  // namespace

Block philox4x64_10(Block c, Key k) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : key_{seed, stream} {
  counter_[1] = substream;
}

Philox::result_type Philox::operator()() {
  if (next_ == 4) {
    buffer_ = philox4x64_10(counter_, key_);
    ++counter_[0];
    next_ = 0;
  }
  return buffer_[static_cast<std::size_t>(next_++)];
}

double Philox::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Philox::uniform_pos() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

double Gaussian::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = engine_.uniform_pos();
  const double u2 = engine_.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace nspbound::random
