#pragma once

// Discrete-event model of the sub-GHz synchronization scheme.
//
// A timekeeper broadcasts its time every sync interval. Each edge node
// latches its local clock when the sync word is detected (after a detection
// delay), parses the packet some time later, and from then on stamps data
// with  T_sync + (local_now - local_latch).  The parse delay therefore never
// enters the stamp. Between broadcasts node clocks drift at their ppm offset.
// Physical events seen simultaneously by all nodes are injected on a fixed
// period and the disagreement of their stamps is recorded.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "physioedge/error.hpp"

namespace physioedge::sync {

struct ClockModel {
  double nominal_hz = 150e6;  // system clock from the 12 MHz crystal
  double ppm_offset = 0.0;
  double phase_offset_s = 0.0;

  double local_time(double true_time_s) const noexcept {
    return phase_offset_s + (1.0 + ppm_offset * 1e-6) * true_time_s;
  }
};

/// Delay distribution in seconds.
struct Distribution {
  enum class Kind { none, uniform, gaussian };
  Kind kind = Kind::none;
  double a = 0.0;  // uniform lower bound, or gaussian mean
  double b = 0.0;  // uniform upper bound, or gaussian sigma

  static Distribution none() { return {}; }
  static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  static Distribution gaussian(double mean, double sigma) { return {Kind::gaussian, mean, sigma}; }

  static constexpr double truncation_sigmas = 4.0;

  /// Constant added to gaussian draws so the truncated support starts at or
  /// above zero. It is common to all nodes and cancels pairwise.
  double gaussian_shift() const noexcept {
    return kind == Kind::gaussian ? std::max(0.0, truncation_sigmas * b - a) : 0.0;
  }

  double support_max() const noexcept {
    switch (kind) {
      case Kind::none: return 0.0;
      case Kind::uniform: return b;
      case Kind::gaussian: return a + truncation_sigmas * b + gaussian_shift();
    }
    return 0.0;
  }

  void validate(const char* what) const {
    const std::string name(what);
    if (!std::isfinite(a) || !std::isfinite(b)) throw error(errc::invalid_argument, name + ": non-finite parameter");
    if (kind == Kind::uniform && !(a >= 0.0 && a <= b)) {
      throw error(errc::invalid_argument, name + ": uniform bounds must satisfy 0 <= a <= b");
    }
    if (kind == Kind::gaussian && !(b >= 0.0)) throw error(errc::invalid_argument, name + ": sigma must be >= 0");
  }
};

struct JitterModel {
  Distribution detect_jitter;
  double parse_latency_min_s = 1e-4;
  double parse_latency_max_s = 1e-2;
};

struct SimConfig {
  std::size_t n_edge_nodes = 2;
  double sync_interval_s = 5.0;
  double duration_s = 600.0;
  std::uint64_t rng_seed = 1;
  std::uint32_t sample_rate_hz = 8000;
  double event_period_s = 0.1;
  double ppm_bound = 10.0;
};

struct SyncEvent {
  std::size_t event_index;
  double true_time_s;
  std::size_t node_id;
  double latched_local_time_s;  // latch of the correction in effect
  double corrected_timestamp_s;
};

struct SyncTrace {
  std::size_t n_nodes = 0;
  std::vector<SyncEvent> events;       // n_nodes consecutive entries per physical event
  std::vector<double> pairwise_err_s;  // per physical event: max - min corrected stamp
  std::vector<double> response_diff_s;  // per broadcast: max - min detection instant
};

namespace detail {

class DrawSource {
 public:
  explicit DrawSource(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double standard_normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double draw(const Distribution& d) {
    switch (d.kind) {
      case Distribution::Kind::none: return 0.0;
      case Distribution::Kind::uniform: return d.a + (d.b - d.a) * uniform01();
      case Distribution::Kind::gaussian: {
        double z;
        do {
          z = standard_normal();
        } while (std::abs(z) > Distribution::truncation_sigmas);
        return d.a + d.b * z + d.gaussian_shift();
      }
    }
    return 0.0;
  }

 private:
  std::mt19937_64 gen_;
};

struct Correction {
  double timekeeper_s;
  double latch_local_s;
  double parse_true_s;
};

}  // namespace detail

inline void validate(const SimConfig& config, std::span<const ClockModel> clocks, const JitterModel& jitter) {
  using physioedge::detail::require;
  require(config.n_edge_nodes >= 2, errc::invalid_argument, "need at least 2 edge nodes");
  require(clocks.size() == config.n_edge_nodes, errc::invalid_argument, "one clock model per node");
  require(config.sync_interval_s > 0.0 && std::isfinite(config.sync_interval_s), errc::invalid_argument,
          "sync interval must be positive");
  require(config.duration_s >= config.sync_interval_s, errc::invalid_argument,
          "duration must be at least one sync interval");
  require(config.event_period_s > 0.0, errc::invalid_argument, "event period must be positive");
  require(config.sample_rate_hz > 0, errc::invalid_argument, "sample rate must be positive");
  for (const auto& c : clocks) {
    require(std::isfinite(c.ppm_offset) && std::abs(c.ppm_offset) <= config.ppm_bound, errc::invalid_argument,
            "ppm offset exceeds the configured bound");
    require(std::isfinite(c.phase_offset_s), errc::invalid_argument, "phase offset must be finite");
    require(c.nominal_hz > 0.0, errc::invalid_argument, "nominal clock must be positive");
  }
  jitter.detect_jitter.validate("detect jitter");
  require(jitter.parse_latency_min_s >= 0.0 && jitter.parse_latency_min_s <= jitter.parse_latency_max_s,
          errc::invalid_argument, "parse latency range must satisfy 0 <= min <= max");
  require(jitter.detect_jitter.support_max() + jitter.parse_latency_max_s < config.sync_interval_s,
          errc::invalid_argument, "a packet must be parsed before the next sync message");
}

inline SyncTrace run_simulation(const SimConfig& config, std::span<const ClockModel> clocks,
                                const JitterModel& jitter) {
  validate(config, clocks, jitter);
  const std::size_t n = config.n_edge_nodes;
  detail::DrawSource rng(config.rng_seed);

  // Broadcast schedule, drawn node by node in broadcast order.
  const auto n_sync = static_cast<std::size_t>(std::floor(config.duration_s / config.sync_interval_s)) + 1;
  std::vector<std::vector<detail::Correction>> corrections(n);
  SyncTrace trace;
  trace.n_nodes = n;
  trace.response_diff_s.reserve(n_sync);
  for (std::size_t j = 0; j < n_sync; ++j) {
    const double t_sync = static_cast<double>(j) * config.sync_interval_s;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      const double detect = t_sync + rng.draw(jitter.detect_jitter);
      const double parse = detect + jitter.parse_latency_min_s +
                           (jitter.parse_latency_max_s - jitter.parse_latency_min_s) * rng.uniform01();
      corrections[i].push_back({t_sync, clocks[i].local_time(detect), parse});
      lo = std::min(lo, detect);
      hi = std::max(hi, detect);
    }
    trace.response_diff_s.push_back(hi - lo);
  }

  // Physical events; a stamp uses the newest correction parsed strictly
  // before the event.
  std::vector<std::size_t> next(n, 0);
  std::vector<double> stamps(n);
  std::size_t event_index = 0;
  const auto n_events =
      static_cast<std::size_t>(std::floor(config.duration_s / config.event_period_s * (1.0 + 1e-12)));
  for (std::size_t k = 1; k <= n_events; ++k) {
    const double t = static_cast<double>(k) * config.event_period_s;
    bool ready = true;
    for (std::size_t i = 0; i < n; ++i) {
      while (next[i] < corrections[i].size() && corrections[i][next[i]].parse_true_s < t) ++next[i];
      ready = ready && next[i] > 0;
    }
    if (!ready) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = corrections[i][next[i] - 1];
      stamps[i] = c.timekeeper_s + (clocks[i].local_time(t) - c.latch_local_s);
      trace.events.push_back({event_index, t, i, c.latch_local_s, stamps[i]});
      lo = std::min(lo, stamps[i]);
      hi = std::max(hi, stamps[i]);
    }
    trace.pairwise_err_s.push_back(hi - lo);
    ++event_index;
  }
  return trace;
}

struct Margin {
  double max_err_s;
  double max_fs_hz;  // infinity when max_err is 0
  bool pass;
};

inline Margin margin_from_error(double max_err_s, double sample_rate_hz) {
  physioedge::detail::require(max_err_s >= 0.0, errc::invalid_argument, "error must be nonnegative");
  physioedge::detail::require(sample_rate_hz > 0.0, errc::invalid_argument, "sample rate must be positive");
  const double max_fs = max_err_s > 0.0 ? 1.0 / max_err_s : std::numeric_limits<double>::infinity();
  return {max_err_s, max_fs, max_err_s < 1.0 / sample_rate_hz};
}

/// Largest stamp disagreement in the trace, the highest sample rate it still
/// resolves to within one sample, and whether sample_rate_hz is within it.
inline Margin single_sample_margin(const SyncTrace& trace, double sample_rate_hz) {
  physioedge::detail::require(!trace.pairwise_err_s.empty(), errc::invalid_argument, "empty trace");
  physioedge::detail::require(sample_rate_hz > 0.0, errc::invalid_argument, "sample rate must be positive");
  const double max_err = *std::max_element(trace.pairwise_err_s.begin(), trace.pairwise_err_s.end());
  return margin_from_error(max_err, sample_rate_hz);
}

struct Summary {
  double median_s;
  double std_s;
  double max_s;
  Margin margin;
};

namespace detail {
inline double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}
}  // namespace detail

/// Statistics of the per-broadcast response differences plus the stamp
/// margin at sample_rate_hz.
inline Summary summarize(const SyncTrace& trace, double sample_rate_hz) {
  const auto& d = trace.response_diff_s;
  physioedge::detail::require(!d.empty(), errc::invalid_argument, "empty trace");
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double x : d) var += (x - mean) * (x - mean);
  var /= static_cast<double>(d.size());
  return {detail::median(d), std::sqrt(var), *std::max_element(d.begin(), d.end()),
          single_sample_margin(trace, sample_rate_hz)};
}

/// Parses "none", "uniform:LO,HI" or "gaussian:MEAN,SIGMA", values in
/// microseconds.
inline Distribution parse_distribution_us(std::string_view spec) {
  if (spec == "none") return Distribution::none();
  const auto colon = spec.find(':');
  const auto comma = spec.find(',');
  if (colon == std::string_view::npos || comma == std::string_view::npos || comma < colon) {
    throw error(errc::invalid_argument, "jitter must be none, uniform:LO,HI or gaussian:MEAN,SIGMA");
  }
  const std::string kind(spec.substr(0, colon));
  double p1, p2;
  try {
    std::size_t used1 = 0, used2 = 0;
    const std::string s1(spec.substr(colon + 1, comma - colon - 1));
    const std::string s2(spec.substr(comma + 1));
    p1 = std::stod(s1, &used1);
    p2 = std::stod(s2, &used2);
    if (used1 != s1.size() || used2 != s2.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw error(errc::invalid_argument, "bad jitter parameters in '" + std::string(spec) + "'");
  }
  Distribution d;
  if (kind == "uniform") {
    d = Distribution::uniform(p1 * 1e-6, p2 * 1e-6);
  } else if (kind == "gaussian") {
    d = Distribution::gaussian(p1 * 1e-6, p2 * 1e-6);
  } else {
    throw error(errc::invalid_argument, "unknown jitter kind '" + kind + "'");
  }
  d.validate("jitter");
  return d;
}

}  // namespace physioedge::sync
