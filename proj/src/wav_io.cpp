#include "tsekit/wav_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "tsekit/error.hpp"

namespace tsekit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(static_cast<std::uint32_t>(p[0]) |
                                    (static_cast<std::uint32_t>(p[1]) << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void malformed(const std::filesystem::path& path,
                            const std::string& what) {
  throw Error(Error::Kind::wav_malformed, path.string() + ": " + what);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Error::Kind::io, "cannot open " + path.string());
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Error::Kind::io, "read failed: " + path.string());

  if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    malformed(path, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* tag = reinterpret_cast<const char*>(raw.data() + pos);
    const std::uint32_t len = read_u32(raw.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > raw.size()) malformed(path, "chunk overruns file");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (len < 16) malformed(path, "fmt chunk too short");
      format = read_u16(raw.data() + body);
      channels = read_u16(raw.data() + body + 2);
      rate = read_u32(raw.data() + body + 4);
      bits = read_u16(raw.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = raw.data() + body;
      data_len = len;
    }
    // Chunk bodies are word-aligned; odd lengths carry a pad byte.
    pos = body + len + (len & 1u);
  }

  if (!have_fmt) malformed(path, "missing fmt chunk");
  if (data == nullptr) malformed(path, "missing data chunk");
  if (channels != 1)
    throw Error(Error::Kind::wav_unsupported_channels,
                path.string() + ": only mono supported, got " +
                    std::to_string(channels) + " channels");
  if (rate != 8000 && rate != 16000)
    throw Error(Error::Kind::wav_unsupported_rate,
                path.string() + ": unsupported sample rate " +
                    std::to_string(rate) + " Hz");

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    if (data_len % 2 != 0) malformed(path, "pcm16 data length is odd");
    const std::size_t n = data_len / 2;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint16_t u = read_u16(data + 2 * i);
      w.samples[i] = static_cast<std::int16_t>(u) / 32768.0;
    }
  } else if (format == kFormatIeeeFloat && bits == 32) {
    if (data_len % 4 != 0) malformed(path, "float32 data length not 4-aligned");
    const std::size_t n = data_len / 4;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = read_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      w.samples[i] = static_cast<double>(f);
    }
  } else {
    throw Error(Error::Kind::wav_unsupported_codec,
                path.string() + ": unsupported codec (format tag " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits)");
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavCodec codec) {
  Waveform::check_rate(w.sample_rate_hz);
  if (!w.all_finite())
    throw_invalid("write_wav: " + path.string() + ": non-finite sample");
  const std::uint16_t bytes_per_sample = codec == WavCodec::pcm16 ? 2 : 4;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(w.size()) * bytes_per_sample;

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_len);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, codec == WavCodec::pcm16 ? kFormatPcm : kFormatIeeeFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(w.sample_rate_hz) * bytes_per_sample;
  put_u32(out, byte_rate);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  put_tag(out, "data");
  put_u32(out, data_len);

  if (codec == WavCodec::pcm16) {
    for (double v : w.samples) {
      double scaled = std::nearbyint(v * 32768.0);
      if (scaled > 32767.0) scaled = 32767.0;
      if (scaled < -32768.0) scaled = -32768.0;
      const auto s = static_cast<std::int16_t>(scaled);
      put_u16(out, static_cast<std::uint16_t>(s));
    }
  } else {
    for (double v : w.samples) {
      const float f = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put_u32(out, u);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io, "cannot open for write: " + path.string());
  os.write(reinterpret_cast<const char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
}

}  // namespace tsekit
