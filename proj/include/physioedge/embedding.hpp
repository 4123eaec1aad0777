#pragma once

// Front end for a learned reconstructor: the compressed stream is split into
// several pseudo-random subsets ("embeddings"), each resampled onto a fixed
// uniform grid by linear interpolation. Samples may appear in more than one
// embedding.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "physioedge/error.hpp"
#include "physioedge/prmd.hpp"
#include "physioedge/prng.hpp"

namespace physioedge {

inline constexpr std::size_t default_grid_len = 34976;
inline constexpr std::size_t default_embedding_count = 4;

struct TimedSample {
  double time_s;
  double value;
};

struct EmbeddingSet {
  std::vector<std::vector<double>> vectors;  // each of length grid_len
  std::size_t n_embeddings;
  std::uint32_t embed_seed;
  std::size_t source_len;
  std::vector<std::size_t> kept_counts;  // pairs kept per embedding

  std::size_t grid_len() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
};

/// Linear interpolation of `points` at grid_len uniform times spanning
/// [t_begin, t_end]. Grid times outside the points take the nearest endpoint
/// value.
inline std::vector<double> interpolate_to_grid(std::span<const TimedSample> points, std::size_t grid_len,
                                               double t_begin, double t_end) {
  detail::require(points.size() >= 2, errc::invalid_argument, "need at least 2 points");
  detail::require(grid_len >= 2, errc::invalid_argument, "grid_len must be >= 2");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].time_s > points[i - 1].time_s)) {
      throw error(errc::non_monotone, "point times must be strictly increasing");
    }
  }
  std::vector<double> out(grid_len);
  const double dt = (t_end - t_begin) / static_cast<double>(grid_len - 1);
  std::size_t seg = 0;
  for (std::size_t g = 0; g < grid_len; ++g) {
    const double t = g + 1 == grid_len ? t_end : t_begin + dt * static_cast<double>(g);
    if (t <= points.front().time_s) {
      out[g] = points.front().value;
      continue;
    }
    if (t >= points.back().time_s) {
      out[g] = points.back().value;
      continue;
    }
    while (points[seg + 1].time_s < t) ++seg;
    const auto& a = points[seg];
    const auto& b = points[seg + 1];
    const double w = (t - a.time_s) / (b.time_s - a.time_s);
    out[g] = a.value + w * (b.value - a.value);
  }
  return out;
}

inline std::vector<double> interpolate_to_grid(std::span<const TimedSample> points, std::size_t grid_len) {
  detail::require(!points.empty(), errc::invalid_argument, "need at least 2 points");
  return interpolate_to_grid(points, grid_len, points.front().time_s, points.back().time_s);
}

/// Seed of the i-th embedding stream: embed_seed advanced by i over the
/// nonzero 32-bit values.
constexpr std::uint32_t embedding_stream_seed(std::uint32_t embed_seed, std::size_t i) noexcept {
  constexpr std::uint64_t ring = 0xFFFFFFFFull;
  return static_cast<std::uint32_t>((std::uint64_t{embed_seed} - 1 + i % ring) % ring + 1);
}

inline EmbeddingSet make_embeddings(const CompressedRecord& record, std::size_t n, std::uint32_t embed_seed,
                                    std::size_t grid_len = default_grid_len) {
  detail::require(record.values.size() >= 2, errc::invalid_argument, "record needs >= 2 retained values");
  detail::require(n >= 1, errc::invalid_argument, "embedding count must be >= 1");
  detail::require(grid_len >= 2, errc::invalid_argument, "grid_len must be >= 2");
  detail::require(embed_seed != 0, errc::invalid_argument, "embed seed must be nonzero");

  const auto pattern = build_pattern(record);
  detail::require(pattern.indices.size() == record.values.size(), errc::inconsistent_record,
                  "value count disagrees with the seed's pattern");
  const double fs = static_cast<double>(record.sample_rate_hz);
  const double span_end = static_cast<double>(record.original_len - 1) / fs;
  const std::size_t m = record.values.size();

  EmbeddingSet set{{}, n, embed_seed, record.original_len, {}};
  set.vectors.reserve(n);
  std::vector<TimedSample> kept;
  kept.reserve(m / n + m / (2 * n) + 4);
  for (std::size_t e = 0; e < n; ++e) {
    XorShift32 rng(embedding_stream_seed(embed_seed, e));
    kept.clear();
    for (std::size_t j = 0; j < m; ++j) {
      const bool keep = rng() % n == 0 || j == 0 || j + 1 == m;
      if (keep) kept.push_back({static_cast<double>(pattern.indices[j]) / fs, record.values[j]});
    }
    set.kept_counts.push_back(kept.size());
    set.vectors.push_back(interpolate_to_grid(kept, grid_len, 0.0, span_end));
  }
  return set;
}

/// One column per embedding, header e0,e1,...; values printed with 9
/// significant digits.
inline void write_embeddings_csv(std::ostream& os, const EmbeddingSet& set) {
  for (std::size_t e = 0; e < set.vectors.size(); ++e) os << (e ? "," : "") << 'e' << e;
  os << '\n';
  char buf[32];
  for (std::size_t g = 0; g < set.grid_len(); ++g) {
    for (std::size_t e = 0; e < set.vectors.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%.9g", set.vectors[e][g]);
      os << (e ? "," : "") << buf;
    }
    os << '\n';
  }
}

}  // namespace physioedge
