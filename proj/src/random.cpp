#include "clocksync/random.hpp"

#include <array>

namespace clocksync {

namespace {

std::seed_seq make_seed_seq(const StreamKey& key) {
  const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  return std::seed_seq{lo(key.master_seed), hi(key.master_seed), lo(key.cell),
                       hi(key.cell),        lo(key.trial),       hi(key.trial),
                       static_cast<std::uint32_t>(key.channel)};
}

}  // namespace

RandomStream::RandomStream(const StreamKey& key) {
  auto seq = make_seed_seq(key);
  engine_.seed(seq);
}

RandomStream::RandomStream(std::uint64_t seed)
    : RandomStream(StreamKey{seed, 0, 0, Channel::kUNoise}) {}

double RandomStream::exponential(double rate) {
  return std::exponential_distribution<double>(rate)(engine_);
}

double RandomStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

TrialStreams::TrialStreams(std::uint64_t master_seed, std::uint64_t cell,
                           std::uint64_t trial)
    : u_noise(StreamKey{master_seed, cell, trial, Channel::kUNoise}),
      v_noise(StreamKey{master_seed, cell, trial, Channel::kVNoise}),
      xi_process(StreamKey{master_seed, cell, trial, Channel::kXiProcess}),
      psi_process(StreamKey{master_seed, cell, trial, Channel::kPsiProcess}) {}

}  // namespace clocksync
