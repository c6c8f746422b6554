#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace earid {

std::size_t next_pow2(std::size_t n);

// In-place iterative radix-2 FFT; a.size() must be a power of two.
// The inverse includes the 1/N scaling.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

// Real-input FFT, zero-padded or truncated to n_fft points; returns bins
// 0..n_fft/2 (n_fft must be a power of two).
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n_fft);

// Inverse of rfft: rebuilds the Hermitian spectrum from n_fft/2+1 bins and
// returns n_fft real samples.
std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n_fft);

// Linear convolution of a and b truncated to out_len samples.
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b,
                                 std::size_t out_len);

// Cross-correlation out[n] = sum_t s[t] * r[t + n] for n in [0, max_lag).
std::vector<double> fft_cross_correlate(std::span<const double> s, std::span<const double> r,
                                        std::size_t max_lag);

}  // namespace earid
