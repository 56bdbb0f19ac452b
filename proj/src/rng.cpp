#include "spdelab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spdelab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                     std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hilo(kMul0, ctr[0], hi0, lo0);
    mul_hilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t derive_stream_key(std::uint64_t master_seed,
                                std::string_view purpose,
                                std::uint64_t index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a64(purpose));
  h = splitmix64(h ^ index);
  return h;
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view purpose,
                     std::uint64_t index) {
  std::uint64_t k = derive_stream_key(master_seed, purpose, index);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void RngStream::refill() {
  buf_ = philox4x32_10(ctr_, key_);
  pos_ = 0;
  // 128-bit counter increment
  for (int i = 0; i < 4; ++i) {
    if (++ctr_[i] != 0) break;
  }
}

std::uint32_t RngStream::next_u32() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t lo = next_u32();
  std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform_pos();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  std::uint64_t total = 0;
  // Split large means so the product below stays away from underflow.
  while (mean > 30.0) {
    double chunk = 25.0;
    double limit = std::exp(-chunk);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > limit);
    total += k - 1;
    mean -= chunk;
  }
  double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform_pos();
  } while (p > limit);
  return total + k - 1;
}

}  // namespace spdelab
