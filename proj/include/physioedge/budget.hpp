#pragma once

// Data-rate and radio power bookkeeping seeded from the measured PCG
// transmission table (1 Mbps uncompressed baseline, two microphones).

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "physioedge/error.hpp"

namespace physioedge {

enum class Transport { wifi, bluetooth };

constexpr std::string_view to_string(Transport t) noexcept {
  return t == Transport::wifi ? "wifi" : "bluetooth";
}

inline std::optional<Transport> transport_from_string(std::string_view s) noexcept {
  if (s == "wifi") return Transport::wifi;
  if (s == "bluetooth") return Transport::bluetooth;
  return std::nullopt;
}

struct PowerRow {
  Transport transport;
  double cr;  // 1 = uncompressed
  double rate_bps;
  double power_mw;
};

enum class PowerSource { measured, interpolated, unavailable };

constexpr std::string_view to_string(PowerSource s) noexcept {
  switch (s) {
    case PowerSource::measured: return "measured";
    case PowerSource::interpolated: return "interpolated";
    case PowerSource::unavailable: return "unavailable";
  }
  return "unavailable";
}

struct PowerEstimate {
  double power_mw;  // NaN when unavailable
  PowerSource source;
};

inline constexpr double baseline_rate_bps = 1e6;

struct LinkProfile {
  double baseline_rate_bps = physioedge::baseline_rate_bps;
  std::vector<PowerRow> power_table;

  static LinkProfile measured() {
    return {physioedge::baseline_rate_bps,
            {
                {Transport::wifi, 1, 1e6, 25.0},
                {Transport::wifi, 10, 100e3, 23.5},
                {Transport::wifi, 30, 33e3, 22.8},
                {Transport::bluetooth, 10, 100e3, 6.6},
                {Transport::bluetooth, 30, 33e3, 4.9},
            }};
  }
};

inline double effective_rate(double baseline_bps, double cr) {
  detail::require(cr >= 1.0, errc::invalid_argument, "cr must be >= 1");
  detail::require(baseline_bps > 0.0, errc::invalid_argument, "baseline rate must be positive");
  return baseline_bps / cr;
}

/// Exact row if present, otherwise interpolation linear in ln(cr) between
/// the nearest same-transport rows. Outside the measured span: unavailable.
inline PowerEstimate power_lookup(const LinkProfile& profile, Transport transport, double cr) {
  const PowerRow* below = nullptr;
  const PowerRow* above = nullptr;
  for (const auto& row : profile.power_table) {
    if (row.transport != transport) continue;
    if (row.cr == cr) return {row.power_mw, PowerSource::measured};
    if (row.cr < cr && (!below || row.cr > below->cr)) below = &row;
    if (row.cr > cr && (!above || row.cr < above->cr)) above = &row;
  }
  if (!below || !above || !(cr > 0.0)) return {std::nan(""), PowerSource::unavailable};
  const double w = (std::log(cr) - std::log(below->cr)) / (std::log(above->cr) - std::log(below->cr));
  return {below->power_mw + w * (above->power_mw - below->power_mw), PowerSource::interpolated};
}

}  // namespace physioedge
