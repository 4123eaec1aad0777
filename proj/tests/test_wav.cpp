#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "physioedge/wav.hpp"
#include "test_support.hpp"

using namespace physioedge;
using physioedge::fixture::TempDir;

namespace {

// Hand-assembled canonical 44-byte-header PCM image.
std::vector<std::uint8_t> pcm_image(std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
                                    const std::vector<std::int32_t>& interleaved, std::uint16_t format = 1) {
  std::vector<std::uint8_t> b;
  auto u16 = [&](std::uint16_t v) { b.push_back(v & 0xff); b.push_back(v >> 8); };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff); };
  const std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  u32(36 + data_size);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * (bits / 8));
  u16(static_cast<std::uint16_t>(channels * (bits / 8)));
  u16(bits);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  u32(data_size);
  for (auto v : interleaved) {
    if (bits == 16) u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    else if (bits == 32) u32(static_cast<std::uint32_t>(v));
    else b.push_back(static_cast<std::uint8_t>(v));
  }
  return b;
}

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return errc::io_failure;
}

}  // namespace

TEST(Wav, SixteenBitScaling) {
  const auto img = pcm_image(1, 8000, 16, {0, 32767, -32768});
  const auto s = decode_wav(img, Channel::generic);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.samples()[0], 0.0);
  EXPECT_EQ(s.samples()[1], 32767.0 / 32768.0);
  EXPECT_EQ(s.samples()[2], -1.0);
}

TEST(Wav, OneSecondAtEightKilohertz) {
  TempDir dir;
  const auto img = pcm_image(1, 8000, 16, std::vector<std::int32_t>(8000, 100));
  detail::write_file_bytes(dir / "one.wav", img);
  const auto s = load_signal(dir / "one.wav", Channel::respiratory);
  EXPECT_EQ(s.size(), 8000u);
  EXPECT_EQ(s.sample_rate_hz(), 8000u);
  EXPECT_EQ(s.channel(), Channel::respiratory);
}

TEST(Wav, StereoDeinterleave) {
  const auto img = pcm_image(2, 4000, 16, {1, -1, 2, -2, 3, -3});
  const auto left = decode_wav(img, Channel::pcg, 0);
  const auto right = decode_wav(img, Channel::pcg, 1);
  ASSERT_EQ(right.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(left.samples()[i], (i + 1) / 32768.0);
    EXPECT_EQ(right.samples()[i], -(i + 1) / 32768.0);
  }
  EXPECT_EQ(code_of([&] { decode_wav(img, Channel::pcg, 2); }), errc::invalid_argument);
}

TEST(Wav, ThirtyTwoBitScaling) {
  const auto img = pcm_image(1, 8000, 32, {0, 2147483647, -2147483647 - 1, 1 << 30});
  const auto s = decode_wav(img, Channel::generic);
  EXPECT_EQ(s.samples()[2], -1.0);
  EXPECT_EQ(s.samples()[3], 0.5);
}

TEST(Wav, ExtensiblePcmAccepted) {
  auto img = pcm_image(1, 8000, 16, {5, 6});
  // Rebuild the fmt chunk as WAVE_FORMAT_EXTENSIBLE (40-byte body).
  std::vector<std::uint8_t> ext(img.begin(), img.begin() + 12);
  const std::uint8_t fmt[] = {'f', 'm', 't', ' ', 40, 0, 0, 0, 0xFE, 0xFF, 1, 0, 0x40, 0x1F, 0, 0,
                              0x80, 0x3E, 0, 0, 2, 0, 16, 0, 22, 0, 16, 0, 4, 0, 0, 0,
                              1, 0, 0, 0, 0, 0, 0x10, 0, 0x80, 0, 0, 0xAA, 0, 0x38, 0x9B, 0x71};
  ext.insert(ext.end(), std::begin(fmt), std::end(fmt));
  ext.insert(ext.end(), img.begin() + 36, img.end());
  const auto s = decode_wav(ext, Channel::generic);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.samples()[1], 6.0 / 32768.0);
}

TEST(Wav, NamedErrors) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { load_signal(dir / "missing.wav", Channel::generic); }), errc::file_unreadable);
  EXPECT_EQ(code_of([] { decode_wav(pcm_image(1, 8000, 8, {1, 2}), Channel::generic); }),
            errc::unsupported_encoding);
  EXPECT_EQ(code_of([] { decode_wav(pcm_image(1, 8000, 32, {1}, 3), Channel::generic); }),
            errc::unsupported_encoding);
  EXPECT_EQ(code_of([] { decode_wav(pcm_image(1, 8000, 16, {}), Channel::generic); }), errc::empty_payload);
  const std::vector<std::uint8_t> junk = {'n', 'o', 'p', 'e', 0, 0, 0, 0, 'W', 'A', 'V', 'E'};
  EXPECT_EQ(code_of([&] { decode_wav(junk, Channel::generic); }), errc::unsupported_encoding);
}

TEST(Wav, RoundTripWithinOneQuantizationStep) {
  std::mt19937_64 gen(11);
  TempDir dir;
  for (unsigned bits : {16u, 32u}) {
    const double step = bits == 16 ? 1.0 / 32768.0 : 1.0 / 2147483648.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Signal s(fixture::random_samples(500 + 37 * trial, gen), 4000 + 1000 * trial, Channel::ppg);
      write_signal(dir / "rt.wav", s, bits);
      const auto back = load_signal(dir / "rt.wav", Channel::ppg);
      ASSERT_EQ(back.size(), s.size());
      EXPECT_EQ(back.sample_rate_hz(), s.sample_rate_hz());
      for (std::size_t i = 0; i < s.size(); ++i) {
        ASSERT_LE(std::abs(back.samples()[i] - s.samples()[i]), step) << bits << " bit, sample " << i;
      }
    }
  }
}
