#include "earid/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace earid {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) {
    throw std::invalid_argument("fft_inplace: size must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n_fft) {
  if (!is_pow2(n_fft)) {
    throw std::invalid_argument("rfft: n_fft must be a power of two");
  }
  std::vector<std::complex<double>> a(n_fft, {0.0, 0.0});
  const std::size_t m = std::min(x.size(), n_fft);
  for (std::size_t i = 0; i < m; ++i) a[i] = {x[i], 0.0};
  fft_inplace(a);
  a.resize(n_fft / 2 + 1);
  return a;
}

std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n_fft) {
  if (!is_pow2(n_fft)) {
    throw std::invalid_argument("irfft: n_fft must be a power of two");
  }
  if (half.size() != n_fft / 2 + 1) {
    throw std::invalid_argument("irfft: expected n_fft/2+1 bins");
  }
  std::vector<std::complex<double>> a(n_fft);
  for (std::size_t i = 0; i < half.size(); ++i) a[i] = half[i];
  for (std::size_t i = 1; i < n_fft / 2; ++i) a[n_fft - i] = std::conj(half[i]);
  fft_inplace(a, /*inverse=*/true);
  std::vector<double> out(n_fft);
  for (std::size_t i = 0; i < n_fft; ++i) out[i] = a[i].real();
  return out;
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b,
                                 std::size_t out_len) {
  if (a.empty() || b.empty()) return std::vector<double>(out_len, 0.0);
  const std::size_t full = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(full);
  std::vector<std::complex<double>> fa(n, {0.0, 0.0}), fb(n, {0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = {a[i], 0.0};
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = {b[i], 0.0};
  fft_inplace(fa);
  fft_inplace(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace(fa, /*inverse=*/true);
  std::vector<double> out(out_len, 0.0);
  const std::size_t m = std::min(out_len, full);
  for (std::size_t i = 0; i < m; ++i) out[i] = fa[i].real();
  return out;
}

std::vector<double> fft_cross_correlate(std::span<const double> s, std::span<const double> r,
                                        std::size_t max_lag) {
  if (s.size() != r.size()) {
    throw std::invalid_argument("fft_cross_correlate: length mismatch");
  }
  // Zero padding to len + max_lag keeps circular wrap-around out of the
  // requested lag range.
  const std::size_t n = next_pow2(s.size() + max_lag);
  std::vector<std::complex<double>> fs(n, {0.0, 0.0}), fr(n, {0.0, 0.0});
  for (std::size_t i = 0; i < s.size(); ++i) fs[i] = {s[i], 0.0};
  for (std::size_t i = 0; i < r.size(); ++i) fr[i] = {r[i], 0.0};
  fft_inplace(fs);
  fft_inplace(fr);
  for (std::size_t i = 0; i < n; ++i) fs[i] = std::conj(fs[i]) * fr[i];
  fft_inplace(fs, /*inverse=*/true);
  std::vector<double> out(max_lag);
  for (std::size_t i = 0; i < max_lag; ++i) out[i] = fs[i].real();
  return out;
}

}  // namespace earid
