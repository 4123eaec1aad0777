#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "physioedge/error.hpp"
#include "physioedge/signal.hpp"

namespace physioedge {

struct MetricsReport {
  double cr_achieved;
  double rrmse;
  double cc;
};

inline double compression_ratio(std::size_t original_len, std::size_t compressed_len) {
  detail::require(original_len > 0 && compressed_len > 0, errc::invalid_argument,
                  "lengths must be positive");
  return static_cast<double>(original_len) / static_cast<double>(compressed_len);
}

/// sqrt( sum (est - ref)^2 / sum ref^2 )
inline double rrmse(std::span<const double> reference, std::span<const double> estimate) {
  detail::require(reference.size() == estimate.size(), errc::length_mismatch,
                  "reference and estimate differ in length");
  double err = 0.0, energy = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double d = estimate[k] - reference[k];
    err += d * d;
    energy += reference[k] * reference[k];
  }
  detail::require(energy > 0.0, errc::zero_reference, "reference has zero energy");
  return std::sqrt(err / energy);
}

/// Pearson correlation with population (1/n) normalization; the factor
/// cancels, so the value matches the 1/(n-1) convention.
inline double pearson_cc(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), errc::length_mismatch, "inputs differ in length");
  detail::require(a.size() >= 2, errc::invalid_argument, "need at least 2 samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - ma, db = b[k] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  detail::require(va > 0.0 && vb > 0.0, errc::undefined_correlation, "constant input");
  const double cc = (cov / n) / (std::sqrt(va / n) * std::sqrt(vb / n));
  return std::clamp(cc, -1.0, 1.0);
}

inline double rrmse(const Signal& reference, const Signal& estimate) {
  return rrmse(reference.samples(), estimate.samples());
}
inline double pearson_cc(const Signal& reference, const Signal& estimate) {
  return pearson_cc(reference.samples(), estimate.samples());
}

inline MetricsReport evaluate(const Signal& reference, const Signal& estimate, double cr_achieved) {
  detail::require(cr_achieved >= 1.0, errc::invalid_argument, "achieved cr must be >= 1");
  return {cr_achieved, rrmse(reference, estimate), pearson_cc(reference, estimate)};
}

}  // namespace physioedge
