#pragma once

// PECS v1 wire format for compressed records. All multi-byte fields are
// little-endian except the magic, which is the ASCII bytes "PECS".
//
//   off  size  field
//     0     4  magic "PECS" (0x50454353)
//     4     1  version = 1
//     5     1  step mode (0 literal_eq1, 1 mean_exact)
//     6     2  cr
//     8     4  seed
//    12     4  original_len
//    16     4  sample_rate_hz
//    20     1  channel
//    21     4  value count n
//    25    4n  values, IEEE-754 binary32
//  25+4n    4  CRC-32 (IEEE) of bytes [0, 25+4n)

#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <zlib.h>

#include "physioedge/error.hpp"
#include "physioedge/prmd.hpp"
#include "physioedge/wav.hpp"

namespace physioedge {

inline constexpr std::uint32_t pecs_magic = 0x50454353;
inline constexpr std::uint8_t pecs_version = 1;
inline constexpr std::size_t pecs_header_size = 25;

namespace detail {
inline std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in slices for very large payloads.
  constexpr std::size_t slice = 1u << 30;
  for (std::size_t pos = 0; pos < bytes.size(); pos += slice) {
    const auto n = static_cast<uInt>(std::min(slice, bytes.size() - pos));
    crc = ::crc32(crc, bytes.data() + pos, n);
  }
  return static_cast<std::uint32_t>(crc);
}
}  // namespace detail

inline std::vector<std::uint8_t> write_record(const CompressedRecord& rec) {
  using namespace detail;
  detail::require(rec.original_len <= 0xFFFFFFFFu && rec.values.size() <= 0xFFFFFFFFu,
                  errc::invalid_argument, "record too large for PECS v1");
  std::vector<std::uint8_t> out{'P', 'E', 'C', 'S'};
  out.reserve(pecs_header_size + 4 * rec.values.size() + 4);
  out.push_back(pecs_version);
  out.push_back(static_cast<std::uint8_t>(rec.policy.mode()));
  put_u16le(out, rec.policy.cr());
  put_u32le(out, rec.seed);
  put_u32le(out, static_cast<std::uint32_t>(rec.original_len));
  put_u32le(out, rec.sample_rate_hz);
  out.push_back(static_cast<std::uint8_t>(rec.channel));
  put_u32le(out, static_cast<std::uint32_t>(rec.values.size()));
  for (float v : rec.values) put_u32le(out, std::bit_cast<std::uint32_t>(v));
  put_u32le(out, crc32_ieee(out));
  return out;
}

inline CompressedRecord read_record(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  static constexpr std::uint8_t magic[4] = {'P', 'E', 'C', 'S'};
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) throw error(errc::truncated, "stream ends inside magic");
    if (bytes[i] != magic[i]) throw error(errc::bad_magic, "not a PECS record");
  }
  if (bytes.size() < 5) throw error(errc::truncated, "stream ends before version");
  if (bytes[4] != pecs_version) {
    throw error(errc::version_mismatch, "unsupported PECS version " + std::to_string(bytes[4]));
  }
  if (bytes.size() < pecs_header_size) throw error(errc::truncated, "header incomplete");
  const std::uint32_t count = get_u32le(bytes, 21);
  const std::size_t payload_end = pecs_header_size + 4 * static_cast<std::size_t>(count);
  if (bytes.size() < payload_end) throw error(errc::truncated, "values section incomplete");
  if (bytes.size() < payload_end + 4) throw error(errc::truncated, "checksum missing");
  if (get_u32le(bytes, payload_end) != crc32_ieee(bytes.first(payload_end))) {
    throw error(errc::checksum_mismatch, "CRC-32 does not match");
  }

  const std::uint8_t mode = bytes[5];
  const std::uint16_t cr = get_u16le(bytes, 6);
  const std::uint32_t seed = get_u32le(bytes, 8);
  const std::uint32_t original_len = get_u32le(bytes, 12);
  const std::uint32_t rate = get_u32le(bytes, 16);
  const std::uint8_t channel = bytes[20];
  if (mode > 1) throw error(errc::inconsistent_record, "unknown step mode");
  if (cr < 2) throw error(errc::inconsistent_record, "cr must be >= 2");
  if (seed == 0) throw error(errc::inconsistent_record, "zero seed");
  if (original_len < 2) throw error(errc::inconsistent_record, "original_len must be >= 2");
  if (rate == 0) throw error(errc::inconsistent_record, "zero sample rate");
  if (channel > static_cast<std::uint8_t>(Channel::generic)) {
    throw error(errc::inconsistent_record, "unknown channel");
  }

  CompressedRecord rec{{}, seed, StepPolicy(cr, static_cast<StepMode>(mode)), original_len, rate,
                       static_cast<Channel>(channel)};
  rec.values.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    rec.values[i] = std::bit_cast<float>(get_u32le(bytes, pecs_header_size + 4 * std::size_t{i}));
  }
  if (build_pattern(rec).indices.size() != count) {
    throw error(errc::inconsistent_record, "value count disagrees with the seed's pattern");
  }
  return rec;
}

inline void save_record(const std::filesystem::path& path, const CompressedRecord& rec) {
  const auto bytes = write_record(rec);
  detail::write_file_bytes(path, bytes);
}

inline CompressedRecord load_record(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw error(errc::file_unreadable, "input not found: " + path.string());
  }
  const auto bytes = detail::read_file_bytes(path);
  return read_record(bytes);
}

}  // namespace physioedge
