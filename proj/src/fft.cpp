#include "tsekit/fft.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>

#include "tsekit/error.hpp"

namespace tsekit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Twiddle tables per size, built once. Sizes in this codebase are few
// (frame lengths and correlation buffers), so a small cache is enough.
const std::vector<cplx>& twiddles(std::size_t n, bool inverse) {
  static std::mutex mu;
  static std::unordered_map<std::size_t, std::vector<cplx>> fwd, inv;
  std::lock_guard<std::mutex> lock(mu);
  auto& cache = inverse ? inv : fwd;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> tw(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    double a = sign * kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = cplx(std::cos(a), std::sin(a));
  }
  return cache.emplace(n, std::move(tw)).first->second;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft(std::vector<cplx>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) throw_invalid("fft: empty input");
  if (!is_power_of_two(n)) throw_invalid("fft: size must be a power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const std::vector<cplx>& tw = twiddles(n, inverse);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = data[i + k];
        cplx v = data[i + k + len / 2] * tw[k * step];
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (cplx& c : data) c *= scale;
  }
}

std::vector<cplx> rfft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) throw_invalid("rfft: size must be a power of two");
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = cplx(x[i], 0.0);
  fft(buf, false);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> irfft(const std::vector<cplx>& bins, std::size_t n) {
  if (!is_power_of_two(n)) throw_invalid("irfft: size must be a power of two");
  if (bins.size() != n / 2 + 1)
    throw_invalid("irfft: expected " + std::to_string(n / 2 + 1) + " bins");
  std::vector<cplx> buf(n);
  for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = bins[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(bins[n - k]);
  fft(buf, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace tsekit
