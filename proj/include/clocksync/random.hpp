#pragma once

#include <cstdint>
#include <random>

namespace clocksync {

/// Independent noise sources of one simulated dataset.
enum class Channel : std::uint32_t {
  kUNoise = 1,
  kVNoise = 2,
  kXiProcess = 3,
  kPsiProcess = 4,
};

/// Identifies one substream: a Monte-Carlo cell, a trial within it, and a
/// noise channel. Streams with different keys are seeded independently, so
/// trials can run in any order or concurrently and produce the same draws.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t cell = 0;
  std::uint64_t trial = 0;
  Channel channel = Channel::kUNoise;
};

class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);
  explicit RandomStream(std::uint64_t seed);

  double standard_normal() { return normal_(engine_); }
  /// Exp(rate) draw; mean 1/rate.
  double exponential(double rate);
  double uniform(double lo, double hi);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Per-trial bundle of the four channel streams.
struct TrialStreams {
  RandomStream u_noise;
  RandomStream v_noise;
  RandomStream xi_process;
  RandomStream psi_process;

  TrialStreams(std::uint64_t master_seed, std::uint64_t cell, std::uint64_t trial);
  explicit TrialStreams(std::uint64_t master_seed) : TrialStreams(master_seed, 0, 0) {}
};

}  // namespace clocksync
