#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace physioedge {

enum class errc {
  invalid_argument,
  file_unreadable,
  unsupported_encoding,
  empty_payload,
  length_mismatch,
  zero_reference,
  undefined_correlation,
  bad_magic,
  version_mismatch,
  truncated,
  checksum_mismatch,
  inconsistent_record,
  ill_posed,
  non_monotone,
  io_failure,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "invalid argument";
    case errc::file_unreadable: return "file unreadable";
    case errc::unsupported_encoding: return "unsupported encoding";
    case errc::empty_payload: return "empty payload";
    case errc::length_mismatch: return "length mismatch";
    case errc::zero_reference: return "all-zero reference";
    case errc::undefined_correlation: return "undefined correlation";
    case errc::bad_magic: return "bad magic";
    case errc::version_mismatch: return "version mismatch";
    case errc::truncated: return "truncated";
    case errc::checksum_mismatch: return "checksum mismatch";
    case errc::inconsistent_record: return "inconsistent record";
    case errc::ill_posed: return "ill-posed configuration";
    case errc::non_monotone: return "non-monotone times";
    case errc::io_failure: return "i/o failure";
  }
  return "unknown error";
}

// Every failure in the library is reported as this exception; code() names it.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

namespace detail {
inline void require(bool cond, errc code, const char* what) {
  if (!cond) throw error(code, what);
}
}  // namespace detail

}  // namespace physioedge
