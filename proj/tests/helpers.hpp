#pragma once

// Shared test utilities: deterministic signal builders, scratch directories
// and a portable checksum for golden-value pinning.

#include <unistd.h>

#ifdef TSEKIT_CLI_PATH
#include <sys/wait.h>
#endif

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "tsekit/rng.hpp"
#include "tsekit/waveform.hpp"

namespace testutil {

inline constexpr double kTau = 6.283185307179586476925286766559;

inline tsekit::Waveform tone(double freq_hz, std::size_t n, int rate = 16000,
                             double amp = 0.1, double phase = 0.0) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = amp *
           std::sin(phase + kTau * freq_hz * static_cast<double>(i) / rate);
  return tsekit::Waveform(std::move(s), rate);
}

inline tsekit::Waveform noise(std::uint64_t seed, std::size_t n,
                              int rate = 16000, double amp = 0.1) {
  tsekit::Rng rng(seed);
  std::vector<double> s(n);
  for (double& v : s) v = amp * rng.normal();
  return tsekit::Waveform(std::move(s), rate);
}

// Scratch directory under the system temp root, wiped on construction and
// destruction so reruns never see stale files.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("tsekit_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is),
                     std::istreambuf_iterator<char>());
}

inline void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

#ifdef TSEKIT_CLI_PATH
struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string("'") + TSEKIT_CLI_PATH + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  CliResult r;
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Relative path -> file bytes for a whole directory tree.
inline std::map<std::string, std::string> tree_bytes(
    const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    out[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}
#endif  // TSEKIT_CLI_PATH

// FNV-1a over samples rounded to 1e-9 absolute; stable across platforms that
// agree on IEEE double arithmetic, insensitive to sub-nano noise.
inline std::uint64_t waveform_checksum(const tsekit::Waveform& w) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (double v : w.samples)
    mix(static_cast<std::uint64_t>(llround(v * 1e9)));
  return h;
}

}  // namespace testutil
