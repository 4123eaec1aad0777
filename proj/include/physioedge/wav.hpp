#pragma once

// RIFF/WAVE reader and writer for 16- and 32-bit integer PCM, mono or stereo.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "physioedge/error.hpp"
#include "physioedge/signal.hpp"

namespace physioedge {

namespace detail {

inline std::uint16_t get_u16le(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}
inline std::uint32_t get_u32le(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}
inline void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
inline bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::file_unreadable, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::io_failure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw error(errc::io_failure, "short write to " + path.string());
}

constexpr std::uint16_t wave_format_pcm = 1;
constexpr std::uint16_t wave_format_extensible = 0xFFFE;

}  // namespace detail

/// Decodes an in-memory WAV image. channel_index selects the interleaved
/// channel for stereo input.
inline Signal decode_wav(std::span<const std::uint8_t> bytes, Channel channel,
                         unsigned channel_index = 0) {
  using namespace detail;
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw error(errc::unsupported_encoding, "not a RIFF/WAVE container");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32le(bytes, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16 || avail < 16) throw error(errc::unsupported_encoding, "fmt chunk too short");
      std::uint16_t format = get_u16le(bytes, body);
      channels = get_u16le(bytes, body + 2);
      rate = get_u32le(bytes, body + 4);
      bits = get_u16le(bytes, body + 14);
      if (format == wave_format_extensible) {
        // SubFormat GUID starts at offset 24; its first two bytes carry the format tag.
        if (size < 40 || avail < 40) throw error(errc::unsupported_encoding, "extensible fmt too short");
        format = get_u16le(bytes, body + 24);
      }
      if (format != wave_format_pcm) throw error(errc::unsupported_encoding, "only integer PCM is supported");
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, std::min<std::size_t>(size, avail));
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw error(errc::unsupported_encoding, "missing fmt chunk");
  if (bits != 16 && bits != 32) {
    throw error(errc::unsupported_encoding, "bit depth " + std::to_string(bits) + " not supported");
  }
  if (channels != 1 && channels != 2) {
    throw error(errc::unsupported_encoding, "only mono or stereo is supported");
  }
  if (rate == 0) throw error(errc::unsupported_encoding, "zero sample rate");
  if (channel_index >= channels) throw error(errc::invalid_argument, "channel index out of range");
  if (!have_data || data.empty()) throw error(errc::empty_payload, "no sample data");

  const std::size_t bytes_per_sample = bits / 8u;
  const std::size_t frame = bytes_per_sample * channels;
  const std::size_t frames = data.size() / frame;
  if (frames == 0) throw error(errc::empty_payload, "no complete sample frame");

  std::vector<double> samples(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t at = i * frame + channel_index * bytes_per_sample;
    if (bits == 16) {
      samples[i] = static_cast<std::int16_t>(get_u16le(data, at)) / 32768.0;
    } else {
      samples[i] = static_cast<std::int32_t>(get_u32le(data, at)) / 2147483648.0;
    }
  }
  return Signal(std::move(samples), rate, channel);
}

inline Signal load_signal(const std::filesystem::path& path, Channel channel,
                          unsigned channel_index = 0) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw error(errc::file_unreadable, "input not found: " + path.string());
  }
  const auto bytes = detail::read_file_bytes(path);
  return decode_wav(bytes, channel, channel_index);
}

/// Encodes a mono WAV image. Samples are clamped to [-1, 1] and rounded to
/// the nearest integer code of the chosen depth.
inline std::vector<std::uint8_t> encode_wav(const Signal& signal, unsigned bits = 16) {
  using namespace detail;
  detail::require(bits == 16 || bits == 32, errc::unsupported_encoding, "bit depth must be 16 or 32");
  const std::uint32_t bytes_per_sample = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(signal.size() * bytes_per_sample);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32le(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32le(out, 16);
  put_u16le(out, wave_format_pcm);
  put_u16le(out, 1);
  put_u32le(out, signal.sample_rate_hz());
  put_u32le(out, signal.sample_rate_hz() * bytes_per_sample);
  put_u16le(out, static_cast<std::uint16_t>(bytes_per_sample));
  put_u16le(out, static_cast<std::uint16_t>(bits));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32le(out, data_size);

  const double full_scale = bits == 16 ? 32768.0 : 2147483648.0;
  const double lo = -full_scale, hi = full_scale - 1.0;
  for (double x : signal.samples()) {
    const double code = std::clamp(std::nearbyint(std::clamp(x, -1.0, 1.0) * full_scale), lo, hi);
    if (bits == 16) {
      put_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
    } else {
      put_u32le(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(code)));
    }
  }
  return out;
}

inline void write_signal(const std::filesystem::path& path, const Signal& signal, unsigned bits = 16) {
  const auto bytes = encode_wav(signal, bits);
  detail::write_file_bytes(path, bytes);
}

}  // namespace physioedge
