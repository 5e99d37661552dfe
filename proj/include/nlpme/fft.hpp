#pragma once

// Radix-2 complex FFT, in place, unnormalized forward / 1/n-normalized inverse.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "nlpme/errors.hpp"

namespace nlpme {

class Fft {
 public:
  using complex = std::complex<double>;

  explicit Fft(std::size_t n) : n_(n), bitrev_(n), twiddle_(n / 2) {
    if (n < 2 || (n & (n - 1)) != 0) throw domain_error("Fft: length must be a power of two");
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = complex(std::cos(angle), std::sin(angle));
    }
  }

  std::size_t size() const { return n_; }

  void forward(std::span<complex> data) const { transform(data, false); }

  void inverse(std::span<complex> data) const {
    transform(data, true);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : data) v *= scale;
  }

 private:
  void transform(std::span<complex> data, bool inverse) const {
    if (data.size() != n_) throw domain_error("Fft: data length mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          complex w = twiddle_[j * stride];
          if (inverse) w = std::conj(w);
          const complex a = data[start + j];
          const complex b = data[start + j + half] * w;
          data[start + j] = a + b;
          data[start + j + half] = a - b;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<complex> twiddle_;
};

}  // namespace nlpme
