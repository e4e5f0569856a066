#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace spectrasort {

/// Derive the seed of a named random stream from the master seed.
///
/// Every consumer of randomness ("mlp-init", "mlp-shuffle", "subsample",
/// "cv-shuffle", "synth-sample", ...) draws from its own stream, keyed by
/// name plus integer coordinates such as (class, fold) or (alloy, sample).
/// Streams are therefore independent of scheduling and of how much any
/// other stream consumed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name,
                          std::initializer_list<std::uint64_t> keys = {});

/// 64-bit hash (FNV-1a) used for stream names, config hashes and checksums.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

/// A deterministic random stream.
///
/// The distributions are implemented here rather than taken from <random>,
/// whose distribution algorithms are implementation-defined; the engine
/// itself (mt19937_64) is fully specified by the standard.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master_seed, std::string_view name,
            std::initializer_list<std::uint64_t> keys = {})
      : engine_(derive_seed(master_seed, name, keys)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), unbiased; n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spectrasort
