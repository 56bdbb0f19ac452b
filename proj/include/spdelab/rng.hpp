#pragma once
// Counter-based random streams (Philox4x32-10).
//
// A stream is addressed by (master seed, purpose tag, member index), so the
// draws a given ensemble member sees never depend on thread scheduling or on
// how many members run. Distinct purposes ("wiener", "jumps", ...) give
// independent streams for the same member.

#include <array>
#include <cstdint>
#include <string_view>

namespace spdelab {

// One 10-round Philox4x32 block. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t derive_stream_key(std::uint64_t master_seed,
                                std::string_view purpose,
                                std::uint64_t index);

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view purpose,
            std::uint64_t index);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  double uniform();      // [0, 1), 53-bit
  double uniform_pos();  // (0, 1]
  double normal();       // N(0,1), Box-Muller with cached spare

  // Poisson count with the given mean (mean >= 0).
  std::uint64_t poisson(double mean);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spdelab
