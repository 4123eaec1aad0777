#pragma once

// Greedy sparse recovery of a decimated record in an orthonormal DCT basis.
//
// The measurement operator is A = S * C^T, where C^T is the orthonormal
// DCT-III synthesis and S gathers the retained sample positions. It is
// applied matrix-free; only the columns on a candidate support are ever
// materialized, for the least-squares refits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "physioedge/dct.hpp"
#include "physioedge/error.hpp"
#include "physioedge/prmd.hpp"
#include "physioedge/signal.hpp"

namespace physioedge {

class MeasurementOperator {
 public:
  /// indices: strictly increasing positions in [0, transform_len).
  MeasurementOperator(std::vector<std::size_t> indices, std::size_t transform_len)
      : indices_(std::move(indices)), dct_(transform_len), work_(transform_len) {
    detail::require(!indices_.empty(), errc::invalid_argument, "operator needs at least one measurement");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      detail::require(indices_[i] < transform_len && (i == 0 || indices_[i] > indices_[i - 1]),
                      errc::invalid_argument, "indices must be strictly increasing and in range");
    }
  }

  explicit MeasurementOperator(const SamplingPattern& pattern)
      : MeasurementOperator(pattern.indices, pattern.original_len) {}

  std::size_t transform_len() const noexcept { return dct_.size(); }
  std::size_t measurement_count() const noexcept { return indices_.size(); }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  const OrthonormalDct& transform() const noexcept { return dct_; }

  /// Gathered synthesis of `coeffs`.
  std::vector<double> forward(std::span<const double> coeffs) const {
    detail::require(coeffs.size() == transform_len(), errc::length_mismatch, "coefficient length");
    dct_.inverse(coeffs, work_);
    std::vector<double> y(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) y[i] = work_[indices_[i]];
    return y;
  }

  /// Transpose of forward(): scatter to the full grid, then analyze.
  std::vector<double> adjoint(std::span<const double> y) const {
    detail::require(y.size() == indices_.size(), errc::length_mismatch, "measurement length");
    std::fill(work_.begin(), work_.end(), 0.0);
    for (std::size_t i = 0; i < indices_.size(); ++i) work_[indices_[i]] = y[i];
    std::vector<double> out(transform_len());
    dct_.forward(work_, out);
    return out;
  }

  /// Dense columns of A restricted to `support`.
  Eigen::MatrixXd columns(std::span<const std::size_t> support) const {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(indices_.size()), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
      for (std::size_t i = 0; i < indices_.size(); ++i) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dct_.atom(support[j], indices_[i]);
      }
    }
    return a;
  }

 private:
  std::vector<std::size_t> indices_;
  OrthonormalDct dct_;
  mutable std::vector<double> work_;
};

struct SparseSolution {
  std::vector<double> coeffs;        // transform_len entries
  std::vector<std::size_t> support;  // ascending, size <= K
  std::size_t K = 0;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool ridge_fallback = false;
  std::vector<double> residual_history;  // after each accepted iteration
};

enum class Algorithm { cosamp, omp, external };

constexpr std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::cosamp: return "cosamp";
    case Algorithm::omp: return "omp";
    case Algorithm::external: return "external";
  }
  return "external";
}

struct ReconstructorChoice {
  Algorithm algorithm = Algorithm::cosamp;
  std::size_t K = 64;
  std::size_t max_iter = 50;
  double tol = 1e-9;           // relative residual ||r|| / ||y||
  std::size_t block_len = 0;   // 0: one transform over the whole record
};

namespace detail {

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Positions of the `count` largest |v|, ties to the lower position; ascending.
inline std::vector<std::size_t> top_magnitudes(std::span<const double> v, std::size_t count) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  count = std::min(count, v.size());
  auto larger = [&](std::size_t a, std::size_t b) {
    const double fa = std::abs(v[a]), fb = std::abs(v[b]);
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(), larger);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct LeastSquares {
  Eigen::VectorXd x;
  bool ridge = false;
};

inline LeastSquares solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() == a.cols()) return {qr.solve(y), false};
  const Eigen::MatrixXd gram = a.transpose() * a;
  const double lambda = 1e-10 * gram.trace() / static_cast<double>(std::max<Eigen::Index>(a.cols(), 1));
  const Eigen::MatrixXd reg = gram + lambda * Eigen::MatrixXd::Identity(a.cols(), a.cols());
  return {reg.ldlt().solve(a.transpose() * y), true};
}

inline void validate_problem(const MeasurementOperator& op, std::span<const double> y, std::size_t K) {
  require(K >= 1, errc::invalid_argument, "sparsity K must be >= 1");
  require(y.size() == op.measurement_count(), errc::length_mismatch, "measurement length");
  require(K < op.measurement_count(), errc::ill_posed, "K must be smaller than the measurement count");
  for (double v : y) require(std::isfinite(v), errc::invalid_argument, "measurements must be finite");
}

struct SupportFit {
  std::vector<std::size_t> support;
  Eigen::VectorXd values;
  Eigen::VectorXd residual;
  double residual_norm;
  bool ridge;
};

inline SupportFit fit_support(const MeasurementOperator& op, const Eigen::VectorXd& y,
                              std::vector<std::size_t> support) {
  const Eigen::MatrixXd a = op.columns(support);
  auto ls = solve_least_squares(a, y);
  Eigen::VectorXd r = y - a * ls.x;
  const double rn = r.norm();
  return {std::move(support), std::move(ls.x), std::move(r), rn, ls.ridge};
}

inline void store_fit(SparseSolution& sol, const SupportFit& fit) {
  std::fill(sol.coeffs.begin(), sol.coeffs.end(), 0.0);
  for (std::size_t j = 0; j < fit.support.size(); ++j) {
    sol.coeffs[fit.support[j]] = fit.values(static_cast<Eigen::Index>(j));
  }
  sol.support = fit.support;
  sol.residual_norm = fit.residual_norm;
}

}  // namespace detail

/// CoSaMP. Each iteration merges the 2K strongest proxy atoms with the
/// current support, solves least squares there, prunes to the K largest and
/// refits. An iterate is accepted only if it lowers the residual; the loop
/// ends at ||r|| <= tol ||y||, on a stall, or after max_iter.
inline SparseSolution cosamp(const MeasurementOperator& op, std::span<const double> y, std::size_t K,
                             std::size_t max_iter, double tol) {
  detail::validate_problem(op, y, K);
  SparseSolution sol;
  sol.coeffs.assign(op.transform_len(), 0.0);
  sol.K = K;
  const double ynorm = detail::norm2(y);
  sol.residual_norm = ynorm;
  if (ynorm <= tol * ynorm || ynorm == 0.0) {
    sol.converged = true;
    return sol;
  }

  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  std::vector<double> residual(y.begin(), y.end());
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const auto proxy = op.adjoint(residual);
    auto merged = detail::top_magnitudes(proxy, 2 * K);
    merged.insert(merged.end(), sol.support.begin(), sol.support.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    const auto wide = detail::fit_support(op, yv, merged);
    std::vector<double> wide_vals(wide.values.data(), wide.values.data() + wide.values.size());
    std::vector<std::size_t> pruned;
    for (std::size_t pos : detail::top_magnitudes(wide_vals, K)) pruned.push_back(merged[pos]);
    const auto fit = detail::fit_support(op, yv, std::move(pruned));

    if (!(fit.residual_norm < sol.residual_norm)) break;
    detail::store_fit(sol, fit);
    sol.ridge_fallback = sol.ridge_fallback || wide.ridge || fit.ridge;
    sol.iterations = it;
    sol.residual_history.push_back(fit.residual_norm);
    residual.assign(fit.residual.data(), fit.residual.data() + fit.residual.size());
    if (fit.residual_norm <= tol * ynorm) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

/// Orthogonal matching pursuit: one atom per iteration, full refit, at most
/// K iterations.
inline SparseSolution omp(const MeasurementOperator& op, std::span<const double> y, std::size_t K, double tol) {
  detail::validate_problem(op, y, K);
  SparseSolution sol;
  sol.coeffs.assign(op.transform_len(), 0.0);
  sol.K = K;
  const double ynorm = detail::norm2(y);
  sol.residual_norm = ynorm;
  if (ynorm <= tol * ynorm || ynorm == 0.0) {
    sol.converged = true;
    return sol;
  }

  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  std::vector<double> residual(y.begin(), y.end());
  std::vector<std::size_t> support;
  for (std::size_t it = 1; it <= K; ++it) {
    auto proxy = op.adjoint(residual);
    for (std::size_t s : support) proxy[s] = 0.0;
    const auto best = detail::top_magnitudes(proxy, 1).front();
    support.insert(std::upper_bound(support.begin(), support.end(), best), best);

    const auto fit = detail::fit_support(op, yv, support);
    detail::store_fit(sol, fit);
    sol.ridge_fallback = sol.ridge_fallback || fit.ridge;
    sol.iterations = it;
    sol.residual_history.push_back(fit.residual_norm);
    residual.assign(fit.residual.data(), fit.residual.data() + fit.residual.size());
    if (fit.residual_norm <= tol * ynorm) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

struct BlockSolution {
  std::size_t begin;
  std::size_t length;
  SparseSolution solution;
};

struct Reconstruction {
  Signal signal;
  std::vector<BlockSolution> blocks;
};

/// [begin, end) spans of the transform blocks. A tail shorter than block_len
/// joins the preceding block.
inline std::vector<std::pair<std::size_t, std::size_t>> transform_blocks(std::size_t n, std::size_t block_len) {
  if (block_len == 0 || block_len >= n) return {{0, n}};
  const std::size_t count = n / block_len;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < count; ++b) out.emplace_back(b * block_len, (b + 1) * block_len);
  out.back().second = n;
  return out;
}

inline Reconstruction reconstruct_detailed(const CompressedRecord& record, const ReconstructorChoice& choice) {
  detail::require(choice.algorithm != Algorithm::external, errc::invalid_argument,
                  "external reconstruction is a CSV handoff, not an in-process solver");
  detail::require(choice.max_iter >= 1, errc::invalid_argument, "max_iter must be >= 1");
  detail::require(choice.tol >= 0.0, errc::invalid_argument, "tol must be nonnegative");
  const auto pattern = build_pattern(record);
  detail::require(pattern.indices.size() == record.values.size(), errc::inconsistent_record,
                  "value count disagrees with the seed's pattern");

  std::vector<double> out(record.original_len, 0.0);
  std::vector<BlockSolution> blocks;
  std::size_t cursor = 0;
  for (const auto& [begin, end] : transform_blocks(record.original_len, choice.block_len)) {
    std::vector<std::size_t> local;
    std::vector<double> y;
    while (cursor < pattern.indices.size() && pattern.indices[cursor] < end) {
      local.push_back(pattern.indices[cursor] - begin);
      y.push_back(record.values[cursor]);
      ++cursor;
    }
    if (local.size() <= choice.K) {
      throw error(errc::ill_posed, "block at sample " + std::to_string(begin) + " has " +
                                       std::to_string(local.size()) + " measurements for K=" +
                                       std::to_string(choice.K));
    }
    MeasurementOperator op(std::move(local), end - begin);
    auto sol = choice.algorithm == Algorithm::cosamp ? cosamp(op, y, choice.K, choice.max_iter, choice.tol)
                                                     : omp(op, y, choice.K, choice.tol);
    std::span<double> dst(out.data() + begin, end - begin);
    op.transform().inverse(sol.coeffs, dst);
    blocks.push_back({begin, end - begin, std::move(sol)});
  }
  return {Signal(std::move(out), record.sample_rate_hz, record.channel), std::move(blocks)};
}

inline Signal reconstruct(const CompressedRecord& record, const ReconstructorChoice& choice) {
  return reconstruct_detailed(record, choice).signal;
}

/// Solver diagnostics: block,iteration,residual.
inline void write_diagnostics_csv(std::ostream& os, const Reconstruction& rec) {
  os << "block,iteration,residual\n";
  char buf[32];
  for (std::size_t b = 0; b < rec.blocks.size(); ++b) {
    const auto& hist = rec.blocks[b].solution.residual_history;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9e", hist[i]);
      os << b << ',' << i + 1 << ',' << buf << '\n';
    }
  }
}

}  // namespace physioedge
