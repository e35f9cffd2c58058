#pragma once

#include <array>
#include <cstdint>

namespace pbm {

// Seedable random stream: xoshiro256** state derived from
// (seed, stream_id) through splitmix64.  Identical (seed, stream_id)
// reproduce identical draw sequences; distinct stream_ids give
// statistically independent streams, so replications can run on
// separate workers without sharing state.  The object is small and
// copyable, which the path oracle uses to snapshot and replay cycles.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal via the Marsaglia polar method (cached spare).
  double normal();

 private:
  std::array<uint64_t, 4> s_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pbm
