#pragma once

// Orthonormal DCT-II (analysis) and DCT-III (synthesis) of a fixed length,
// backed by FFTW's REDFT10/REDFT01 kernels with the orthonormal rescaling
// applied around them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

#include <fftw3.h>

#include "physioedge/error.hpp"

namespace physioedge {

namespace detail {
// The FFTW planner is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct fftw_buffer_free {
  void operator()(double* p) const noexcept { fftw_free(p); }
};
}  // namespace detail

/// Holds an internal work buffer: one instance per thread.
class OrthonormalDct {
 public:
  explicit OrthonormalDct(std::size_t n) : n_(n) {
    detail::require(n >= 1, errc::invalid_argument, "DCT length must be >= 1");
    buf_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    if (!buf_) throw std::bad_alloc();
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      const int len = static_cast<int>(n);
      forward_ = fftw_plan_r2r_1d(len, buf_.get(), buf_.get(), FFTW_REDFT10, FFTW_ESTIMATE);
      inverse_ = fftw_plan_r2r_1d(len, buf_.get(), buf_.get(), FFTW_REDFT01, FFTW_ESTIMATE);
    }
    if (!forward_ || !inverse_) {
      release();
      throw error(errc::invalid_argument, "FFTW could not plan the transform");
    }
  }

  OrthonormalDct(const OrthonormalDct&) = delete;
  OrthonormalDct& operator=(const OrthonormalDct&) = delete;
  ~OrthonormalDct() { release(); }

  std::size_t size() const noexcept { return n_; }

  /// DCT-II: X_k = c_k sum_n x_n cos(pi (2n+1) k / 2N), c_0 = sqrt(1/N), c_k = sqrt(2/N).
  void forward(std::span<const double> in, std::span<double> out) const {
    check(in, out);
    std::copy(in.begin(), in.end(), buf_.get());
    fftw_execute(forward_);
    // REDFT10 yields 2 sum x_n cos(...).
    const double c0 = std::sqrt(1.0 / static_cast<double>(n_)) * 0.5;
    const double ck = std::sqrt(2.0 / static_cast<double>(n_)) * 0.5;
    out[0] = buf_.get()[0] * c0;
    for (std::size_t k = 1; k < n_; ++k) out[k] = buf_.get()[k] * ck;
  }

  /// DCT-III, the inverse (and transpose) of forward().
  void inverse(std::span<const double> in, std::span<double> out) const {
    check(in, out);
    // REDFT01 yields X_0 + 2 sum_{k>=1} X_k cos(...); prescale to absorb c_k.
    const double c0 = std::sqrt(1.0 / static_cast<double>(n_));
    const double ck = std::sqrt(2.0 / static_cast<double>(n_)) * 0.5;
    buf_.get()[0] = in[0] * c0;
    for (std::size_t k = 1; k < n_; ++k) buf_.get()[k] = in[k] * ck;
    fftw_execute(inverse_);
    std::copy(buf_.get(), buf_.get() + n_, out.begin());
  }

  /// Value of synthesis atom k at sample n.
  double atom(std::size_t k, std::size_t n) const noexcept {
    const double nn = static_cast<double>(n_);
    const double scale = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    return scale * std::cos(M_PI * (2.0 * static_cast<double>(n) + 1.0) * static_cast<double>(k) / (2.0 * nn));
  }

 private:
  void check(std::span<const double> in, std::span<double> out) const {
    detail::require(in.size() == n_ && out.size() == n_, errc::length_mismatch, "DCT length mismatch");
  }
  void release() noexcept {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (inverse_) fftw_destroy_plan(inverse_);
    forward_ = inverse_ = nullptr;
  }

  std::size_t n_;
  std::unique_ptr<double, detail::fftw_buffer_free> buf_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace physioedge
