#pragma once

// Pseudo-random moving decimation: a signal is reduced to the samples at a
// seed-determined index set. Only the seed travels with the data; the index
// set is rebuilt on the receiving side.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "physioedge/error.hpp"
#include "physioedge/prng.hpp"
#include "physioedge/signal.hpp"

namespace physioedge {

struct SamplingPattern {
  std::vector<std::size_t> indices;  // strictly increasing, indices[0] == 0
  std::uint32_t seed;
  StepPolicy policy;
  std::size_t original_len;

  friend bool operator==(const SamplingPattern&, const SamplingPattern&) = default;
};

struct CompressedRecord {
  std::vector<float> values;
  std::uint32_t seed;
  StepPolicy policy;
  std::size_t original_len;
  std::uint32_t sample_rate_hz;
  Channel channel;

  double achieved_cr() const noexcept {
    return static_cast<double>(original_len) / static_cast<double>(values.size());
  }

  friend bool operator==(const CompressedRecord&, const CompressedRecord&) = default;
};

/// Incremental decimator. Feed consecutive chunks of a stream; the step chain
/// carries across chunk boundaries, so any chunking yields the same output.
class PrmdDecimator {
 public:
  PrmdDecimator(std::uint32_t seed, StepPolicy policy) : rng_(seed), policy_(policy) {}

  /// Appends the retained samples of `chunk` to `out`.
  template <typename T, typename Out>
  void consume(std::span<const T> chunk, std::vector<Out>& out) {
    const std::size_t end = position_ + chunk.size();
    while (next_ < end) {
      out.push_back(static_cast<Out>(chunk[next_ - position_]));
      advance();
    }
    position_ = end;
  }

  /// Index of the next sample that will be retained.
  std::size_t next_index() const noexcept { return next_; }
  void advance() noexcept { next_ += policy_.step_for(rng_()); }

 private:
  XorShift32 rng_;
  StepPolicy policy_;
  std::size_t position_ = 0;
  std::size_t next_ = 0;
};

inline SamplingPattern build_pattern(std::uint32_t seed, StepPolicy policy, std::size_t original_len) {
  detail::require(seed != 0, errc::invalid_argument, "seed must be nonzero");
  detail::require(original_len >= 2, errc::invalid_argument, "original_len must be >= 2");
  SamplingPattern p{{}, seed, policy, original_len};
  p.indices.reserve(original_len / policy.cr() + original_len / (4u * policy.cr()) + 16);
  PrmdDecimator walk(seed, policy);
  while (walk.next_index() < original_len) {
    p.indices.push_back(walk.next_index());
    walk.advance();
  }
  return p;
}

inline SamplingPattern build_pattern(const CompressedRecord& record) {
  return build_pattern(record.seed, record.policy, record.original_len);
}

/// Decimates `signal`, streaming it in chunk_len pieces (0 = one piece).
inline CompressedRecord compress(const Signal& signal, std::uint32_t seed, StepPolicy policy,
                                 std::size_t chunk_len = 0) {
  detail::require(!signal.empty(), errc::empty_payload, "cannot compress an empty signal");
  detail::require(seed != 0, errc::invalid_argument, "seed must be nonzero");
  detail::require(signal.size() >= 2, errc::invalid_argument, "signal must hold >= 2 samples");

  CompressedRecord rec{{}, seed, policy, signal.size(), signal.sample_rate_hz(), signal.channel()};
  rec.values.reserve(signal.size() / policy.cr() + signal.size() / (4u * policy.cr()) + 16);
  PrmdDecimator dec(seed, policy);
  for (auto piece : chunks(signal, chunk_len == 0 ? signal.size() : chunk_len)) {
    dec.consume(piece, rec.values);
  }
  return rec;
}

}  // namespace physioedge
