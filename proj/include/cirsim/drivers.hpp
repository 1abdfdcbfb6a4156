#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cirsim/errors.hpp"
#include "cirsim/measures.hpp"

namespace cirsim {

// Substream ids reserved by the stepping scheme. Brownian and jump draws come
// from disjoint substreams of the same (seed, stream id), so changing the jump
// measure never perturbs the Brownian path of the same stream.
namespace substream {
inline constexpr std::uint64_t kBrownianX = 0;
inline constexpr std::uint64_t kJumpsX = 1;
inline constexpr std::uint64_t kBrownianY = 2;
inline constexpr std::uint64_t kJumpsY = 3;
}  // namespace substream

// Counter-based uniform generator: Philox 4x64 with 10 rounds.
//
//   key     = (seed, stream id)
//   counter = (block index, 0, substream id, 0)
//
// Each block yields four 64-bit words; the block index advances before each
// block, the same convention as numpy.random.Philox, so a stream equals
// numpy's random_raw output for counter=(0,0,substream,0), key=(seed,stream).
// Identical (seed, stream, substream) reproduce the same sequence; distinct
// stream ids give statistically independent sequences without jump-ahead
// bookkeeping. Round constants:
//   multipliers 0xD2E7470EE14C6C93, 0xCA5A826395121157
//   Weyl keys   0x9E3779B97F4A7C15, 0xBB67AE8584CAA73B
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t sub = 0)
      : key_{seed, stream_id}, substream_(sub) {}

  // Fresh stream over another substream of the same (seed, stream id).
  RandomStream fork(std::uint64_t sub) const { return RandomStream(key_[0], key_[1], sub); }

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }
  std::uint64_t substream_id() const { return substream_; }

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1): 53-bit mantissa offset by half an ulp,
  // so inverse-transform sampling never sees 0 or 1.
  double uniform01();

  // Standard normal via the AS 241 inverse normal CDF (double precision).
  double normal();

  // Exponential with the given rate > 0.
  double exponential(double rate);

  // One raw block; exposed so tests can pin known answers against an
  // independent implementation of the same function.
  static std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                                 std::array<std::uint64_t, 2> key);

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::uint64_t substream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  unsigned pos_ = 4;  // buffer exhausted, refill on first draw
};

// Inverse of the standard normal CDF (Wichura's PPND16); |error| < 1e-15 for
// p in (0,1). Exposed for tests and for ports that need matching constants.
double normal_inverse_cdf(double p);

// One realized jump of the marked point process.
struct MarkSample {
  double u = 0.0;       // the sampled mark
  std::size_t index = 0;  // index of the atom it came from
};

struct JumpEvent {
  double time = 0.0;
  double mark = 0.0;
  std::size_t atom = 0;
};

// Draw from Normal(0, dt). Throws NonpositiveStep when dt <= 0.
double gaussian_increment(RandomStream& rng, double dt);

// First arrival strictly after `after` of a Poisson process with the given
// rate; nullopt when rate == 0 (no jumps ever).
std::optional<double> next_jump_time(RandomStream& rng, double rate, double after);

// Atom i with probability w_i / total_mass. Throws SamplingFromEmptyMeasure
// for the no-jumps measure. A single-atom measure consumes no randomness.
MarkSample sample_mark(const JumpMeasure& m, RandomStream& rng);

// All events of the marked Poisson process driven by m in (t0, t1], in
// increasing time order: exponential interarrivals at rate total_mass,
// independent categorical marks. Empty for the no-jumps measure.
std::vector<JumpEvent> jump_events_in(RandomStream& rng, const JumpMeasure& m,
                                      double t0, double t1);

}  // namespace cirsim
