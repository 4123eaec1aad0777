#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "physioedge/error.hpp"

namespace physioedge {

enum class Channel : std::uint8_t {
  pcg = 0,
  respiratory = 1,
  biopotential = 2,
  ppg = 3,
  imu_axis = 4,
  generic = 5,
};

constexpr std::string_view to_string(Channel c) noexcept {
  switch (c) {
    case Channel::pcg: return "pcg";
    case Channel::respiratory: return "respiratory";
    case Channel::biopotential: return "biopotential";
    case Channel::ppg: return "ppg";
    case Channel::imu_axis: return "imu_axis";
    case Channel::generic: return "generic";
  }
  return "generic";
}

inline std::optional<Channel> channel_from_string(std::string_view s) noexcept {
  for (auto c : {Channel::pcg, Channel::respiratory, Channel::biopotential, Channel::ppg,
                 Channel::imu_axis, Channel::generic}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

constexpr std::uint32_t pcg_rate_hz = 4000;
constexpr std::uint32_t respiratory_rate_hz = 8000;

/// Uniformly sampled real waveform, amplitudes normalized to [-1, 1].
///
/// Immutable once built. The preset constructors pin the acquisition rate of
/// the acoustic channels (PCG at 4 kHz, respiratory at 8 kHz); anything else
/// goes through the generic constructor.
class Signal {
 public:
  Signal(std::vector<double> samples, std::uint32_t sample_rate_hz,
         Channel channel = Channel::generic)
      : samples_(std::move(samples)), rate_(sample_rate_hz), channel_(channel) {
    detail::require(rate_ > 0, errc::invalid_argument, "sample rate must be positive");
  }

  static Signal pcg(std::vector<double> samples) {
    return Signal(std::move(samples), pcg_rate_hz, Channel::pcg);
  }
  static Signal respiratory(std::vector<double> samples) {
    return Signal(std::move(samples), respiratory_rate_hz, Channel::respiratory);
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::uint32_t sample_rate_hz() const noexcept { return rate_; }
  Channel channel() const noexcept { return channel_; }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / static_cast<double>(rate_);
  }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> samples_;
  std::uint32_t rate_;
  Channel channel_;
};

/// Splits a signal into consecutive slices of chunk_len samples, the last
/// one possibly short. Slices view the signal's storage.
inline std::vector<std::span<const double>> chunks(const Signal& signal, std::size_t chunk_len) {
  detail::require(chunk_len >= 1, errc::invalid_argument, "chunk_len must be >= 1");
  detail::require(!signal.empty(), errc::empty_payload, "cannot chunk an empty signal");
  const auto all = signal.samples();
  std::vector<std::span<const double>> out;
  out.reserve((all.size() + chunk_len - 1) / chunk_len);
  for (std::size_t pos = 0; pos < all.size(); pos += chunk_len) {
    out.push_back(all.subspan(pos, std::min(chunk_len, all.size() - pos)));
  }
  return out;
}

}  // namespace physioedge
