#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tsekit {

using cplx = std::complex<double>;

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft(std::vector<cplx>& data, bool inverse);

// Real-input FFT: returns bins 0..n/2 (n/2+1 values) of the length-n DFT.
std::vector<cplx> rfft(const std::vector<double>& x);

// Inverse of rfft: takes n/2+1 bins, returns the length-n real signal.
std::vector<double> irfft(const std::vector<cplx>& bins, std::size_t n);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace tsekit
