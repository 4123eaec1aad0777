#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>

#include "physioedge/error.hpp"

namespace physioedge {

/// Marsaglia shift/xor generator over a Bits-wide word.
///
/// One step applies x ^= x << A; x ^= x >> B; x ^= x << C, wrapping to Bits
/// bits, and the new state is the output. Zero is the absorbing state of the
/// recurrence and is rejected at construction. Narrow widths exist so the
/// period machinery can be exercised exhaustively in tests.
template <std::unsigned_integral Word, unsigned Bits, unsigned A, unsigned B, unsigned C>
  requires(Bits <= std::numeric_limits<Word>::digits && A < Bits && B < Bits && C < Bits)
class basic_xorshift {
 public:
  using result_type = Word;
  static constexpr Word mask =
      Bits == std::numeric_limits<Word>::digits ? std::numeric_limits<Word>::max()
                                                : static_cast<Word>((Word{1} << Bits) - 1);

  constexpr explicit basic_xorshift(Word seed) : state_(seed & mask) {
    if (state_ == 0) throw error(errc::invalid_argument, "xorshift seed must be nonzero");
  }

  static constexpr Word step(Word x) noexcept {
    x ^= static_cast<Word>(x << A) & mask;
    x ^= x >> B;
    x ^= static_cast<Word>(x << C) & mask;
    return x;
  }

  constexpr Word operator()() noexcept { return state_ = step(state_); }
  constexpr Word state() const noexcept { return state_; }

  static constexpr Word min() noexcept { return 1; }
  static constexpr Word max() noexcept { return mask; }

  friend constexpr bool operator==(const basic_xorshift&, const basic_xorshift&) = default;

 private:
  Word state_;
};

/// The 32-bit generator with the (13, 17, 5) triple. Seeds must reproduce the
/// same sample patterns across implementations, so the triple is fixed.
using XorShift32 = basic_xorshift<std::uint32_t, 32, 13, 17, 5>;

/// State-in/state-out form of one generator step.
constexpr std::pair<XorShift32, std::uint32_t> next_u32(XorShift32 state) noexcept {
  const auto out = state();
  return {state, out};
}

enum class StepMode : std::uint8_t {
  literal_eq1 = 0,  // gap = 1 + x mod 2cr, uniform on [1, 2cr], mean cr + 0.5
  mean_exact = 1,   // gap = 1 + x mod (2cr - 1), uniform on [1, 2cr - 1], mean cr
};

constexpr std::string_view to_string(StepMode m) noexcept {
  return m == StepMode::literal_eq1 ? "literal_eq1" : "mean_exact";
}

/// How a generator output becomes the gap to the next retained sample.
class StepPolicy {
 public:
  constexpr StepPolicy(std::uint16_t cr, StepMode mode = StepMode::mean_exact) : cr_(cr), mode_(mode) {
    if (cr < 2) throw error(errc::invalid_argument, "compression ratio must be >= 2");
    if (mode != StepMode::literal_eq1 && mode != StepMode::mean_exact) {
      throw error(errc::invalid_argument, "unknown step mode");
    }
  }

  constexpr std::uint16_t cr() const noexcept { return cr_; }
  constexpr StepMode mode() const noexcept { return mode_; }

  constexpr std::uint32_t modulus() const noexcept {
    return mode_ == StepMode::literal_eq1 ? 2u * cr_ : 2u * cr_ - 1u;
  }
  constexpr std::uint32_t max_step() const noexcept { return modulus(); }
  constexpr std::uint32_t step_for(std::uint32_t x) const noexcept { return 1u + x % modulus(); }

  friend constexpr bool operator==(const StepPolicy&, const StepPolicy&) = default;

 private:
  std::uint16_t cr_;
  StepMode mode_;
};

constexpr std::pair<XorShift32, std::uint32_t> next_step(XorShift32 state, const StepPolicy& policy) noexcept {
  const auto x = state();
  return {state, policy.step_for(x)};
}

}  // namespace physioedge
