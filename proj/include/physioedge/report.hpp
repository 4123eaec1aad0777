#pragma once

// Text outputs: sync trace CSV, summary JSON, metrics CSV rows and an SVG
// histogram. Every number goes through a fixed printf format so identical
// inputs give byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "physioedge/budget.hpp"
#include "physioedge/metrics.hpp"
#include "physioedge/sync_sim.hpp"

namespace physioedge::report {

namespace detail {
template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[128];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(std::max(n, 0)));
}
}  // namespace detail

inline void write_trace_csv(std::ostream& os, const sync::SyncTrace& trace) {
  os << "event_index,true_time,node,corrected_ts,pairwise_err\n";
  for (const auto& e : trace.events) {
    os << e.event_index << ',' << detail::format("%.6f", e.true_time_s) << ',' << e.node_id << ','
       << detail::format("%.12f", e.corrected_timestamp_s) << ','
       << detail::format("%.6e", trace.pairwise_err_s[e.event_index]) << '\n';
  }
}

inline nlohmann::ordered_json summary_json(const sync::Summary& s, double sample_rate_hz) {
  nlohmann::ordered_json j;
  j["median_s"] = s.median_s;
  j["std_s"] = s.std_s;
  j["max_s"] = s.max_s;
  j["max_err_s"] = s.margin.max_err_s;
  j["max_fs_hz"] = std::isfinite(s.margin.max_fs_hz) ? nlohmann::ordered_json(s.margin.max_fs_hz)
                                                     : nlohmann::ordered_json(nullptr);
  j["sample_rate_hz"] = sample_rate_hz;
  j["single_sample_pass"] = s.margin.pass;
  return j;
}

inline void write_metrics_header(std::ostream& os) {
  os << "signal_id,cr,rrmse,cc,rate_bps,wifi_power_mw,wifi_power_source,bluetooth_power_mw,"
        "bluetooth_power_source\n";
}

/// One metrics row with the budget columns for the achieved ratio.
inline void write_metrics_row(std::ostream& os, std::string_view signal_id, const MetricsReport& m,
                              const LinkProfile& profile = LinkProfile::measured()) {
  const auto wifi = power_lookup(profile, Transport::wifi, m.cr_achieved);
  const auto bt = power_lookup(profile, Transport::bluetooth, m.cr_achieved);
  auto power = [](const PowerEstimate& p) {
    return p.source == PowerSource::unavailable ? std::string() : detail::format("%.2f", p.power_mw);
  };
  os << signal_id << ',' << detail::format("%.4f", m.cr_achieved) << ',' << detail::format("%.9g", m.rrmse)
     << ',' << detail::format("%.9g", m.cc) << ','
     << detail::format("%.1f", effective_rate(profile.baseline_rate_bps, m.cr_achieved)) << ',' << power(wifi)
     << ',' << to_string(wifi.source) << ',' << power(bt) << ',' << to_string(bt.source) << '\n';
}

/// Histogram of `values` (already in display units) as a standalone SVG.
inline void write_histogram_svg(std::ostream& os, std::span<const double> values, std::string_view title,
                                std::string_view x_label, std::size_t bins = 30) {
  constexpr double width = 640, height = 360, left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  double hi = values.empty() ? 1.0 : *std::max_element(values.begin(), values.end());
  double lo = values.empty() ? 0.0 : std::min(0.0, *std::min_element(values.begin(), values.end()));
  if (!(hi > lo)) hi = lo + 1.0;
  bins = std::max<std::size_t>(bins, 1);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  const std::size_t peak = std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));

  using detail::format;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" viewBox=\"0 0 640 360\">\n";
  os << "<rect width=\"640\" height=\"360\" fill=\"white\"/>\n";
  os << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title
     << "</text>\n";
  const double bar_w = plot_w / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double h = plot_h * static_cast<double>(counts[b]) / static_cast<double>(peak);
    os << "<rect x=\"" << format("%.3f", left + bar_w * static_cast<double>(b)) << "\" y=\""
       << format("%.3f", top + plot_h - h) << "\" width=\"" << format("%.3f", bar_w) << "\" height=\""
       << format("%.3f", h) << "\" fill=\"steelblue\" stroke=\"white\"/>\n";
  }
  os << "<line x1=\"60\" y1=\"" << format("%.0f", top + plot_h) << "\" x2=\"" << format("%.0f", left + plot_w)
     << "\" y2=\"" << format("%.0f", top + plot_h) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"" << format("%.0f", top + plot_h) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"60\" y=\"" << format("%.0f", top + plot_h + 18)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format("%.3g", lo)
     << "</text>\n";
  os << "<text x=\"" << format("%.0f", left + plot_w) << "\" y=\"" << format("%.0f", top + plot_h + 18)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format("%.3g", hi)
     << "</text>\n";
  os << "<text x=\"320\" y=\"" << format("%.0f", height - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label << "</text>\n";
  os << "<text x=\"20\" y=\"" << format("%.0f", top + plot_h / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 20 "
     << format("%.0f", top + plot_h / 2) << ")\">count (peak " << peak << ")</text>\n";
  os << "</svg>\n";
}

}  // namespace physioedge::report
