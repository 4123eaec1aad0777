#include <gtest/gtest.h>

#include <cmath>

#include "physioedge/budget.hpp"

using namespace physioedge;

TEST(EffectiveRate, TableRows) {
  EXPECT_DOUBLE_EQ(effective_rate(1e6, 10), 100e3);
  EXPECT_NEAR(effective_rate(1e6, 30) / 1e3, 33.3, 0.05);
  EXPECT_EQ(std::round(effective_rate(1e6, 30) / 1e3), 33.0);
  EXPECT_DOUBLE_EQ(effective_rate(1e6, 1), 1e6);
  EXPECT_THROW(effective_rate(1e6, 0.5), error);
}

TEST(PowerLookup, MeasuredRowsExact) {
  const auto p = LinkProfile::measured();
  const struct {
    Transport t;
    double cr;
    double mw;
  } rows[] = {{Transport::wifi, 1, 25.0}, {Transport::wifi, 10, 23.5}, {Transport::wifi, 30, 22.8},
              {Transport::bluetooth, 10, 6.6}, {Transport::bluetooth, 30, 4.9}};
  for (const auto& r : rows) {
    const auto e = power_lookup(p, r.t, r.cr);
    EXPECT_EQ(e.source, PowerSource::measured);
    EXPECT_EQ(e.power_mw, r.mw);
  }
}

TEST(PowerLookup, InterpolatedBetweenRows) {
  const auto p = LinkProfile::measured();
  const auto bt20 = power_lookup(p, Transport::bluetooth, 20);
  EXPECT_EQ(bt20.source, PowerSource::interpolated);
  EXPECT_GT(bt20.power_mw, 4.9);
  EXPECT_LT(bt20.power_mw, 6.6);
  // Linear in ln(cr): weight ln2/ln3 of the way from 6.6 to 4.9.
  EXPECT_NEAR(bt20.power_mw, 6.6 + std::log(2.0) / std::log(3.0) * (4.9 - 6.6), 1e-12);
  const auto wifi5 = power_lookup(p, Transport::wifi, 5);
  EXPECT_EQ(wifi5.source, PowerSource::interpolated);
  EXPECT_GT(wifi5.power_mw, 23.5);
  EXPECT_LT(wifi5.power_mw, 25.0);
}

TEST(PowerLookup, OutsideTableIsUnavailable) {
  const auto p = LinkProfile::measured();
  EXPECT_EQ(power_lookup(p, Transport::bluetooth, 1).source, PowerSource::unavailable);
  EXPECT_EQ(power_lookup(p, Transport::bluetooth, 4).source, PowerSource::unavailable);
  EXPECT_EQ(power_lookup(p, Transport::wifi, 60).source, PowerSource::unavailable);
  EXPECT_TRUE(std::isnan(power_lookup(p, Transport::wifi, 60).power_mw));
}

TEST(PowerTable, SeedRowsUniqueAndMonotone) {
  const auto p = LinkProfile::measured();
  for (std::size_t i = 0; i < p.power_table.size(); ++i) {
    EXPECT_GT(p.power_table[i].power_mw, 0.0);
    // Table rates are the effective rate rounded to kbps.
    EXPECT_EQ(std::round(effective_rate(p.baseline_rate_bps, p.power_table[i].cr) / 1e3),
              p.power_table[i].rate_bps / 1e3);
    for (std::size_t j = 0; j < p.power_table.size(); ++j) {
      const auto& a = p.power_table[i];
      const auto& b = p.power_table[j];
      if (i == j || a.transport != b.transport) continue;
      EXPECT_NE(a.cr, b.cr);
      if (a.cr < b.cr) {
        EXPECT_GE(a.power_mw, b.power_mw);
      }
    }
  }
}

TEST(Transport, Names) {
  EXPECT_EQ(transport_from_string("wifi"), Transport::wifi);
  EXPECT_EQ(transport_from_string("bluetooth"), Transport::bluetooth);
  EXPECT_FALSE(transport_from_string("lora"));
}
