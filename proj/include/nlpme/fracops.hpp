#pragma once

// Fourier-multiplier realizations of the nonlocal operators on periodic grids:
//   (-Delta)^{alpha/2}  <->  |xi|^alpha
//   grad^beta           <->  i xi |xi|^{beta-1}
//   I_beta              <->  |xi|^{-beta}   (zero mode set to zero)
//
// Every differential/potential multiplier vanishes at xi = 0 and on modes with a
// coordinate at the Nyquist index, so compositions such as div . grad^{alpha-1}
// and -(-Delta)^{alpha/2} coincide exactly on the discrete level.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "nlpme/errors.hpp"
#include "nlpme/fft.hpp"
#include "nlpme/grid.hpp"

namespace nlpme {

/// Scratch space for spectral operators. One per thread; not shareable across concurrent calls.
class SpectralWorkspace {
 public:
  using complex = std::complex<double>;

  explicit SpectralWorkspace(const Grid& grid) : grid_(grid), fft_(grid.n), spectrum_(grid.size()), work_(grid.size()), line_(grid.n) {
    grid.validate();
  }

  const Grid& grid() const { return grid_; }

  /// Forward transform of f into the internal spectrum.
  void load(const Field& f) {
    check(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) spectrum_[i] = complex(f[i], 0.0);
    transform(spectrum_, false);
  }

  /// Multiplies the loaded spectrum by mult(xi, |xi|, nyquist) and returns the real inverse transform.
  template <class Mult>
  std::vector<double> apply(Mult&& mult) {
    const std::size_t n = grid_.n;
    if (grid_.d == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::array<double, 2> xi{grid_.frequency(i), 0.0};
        work_[i] = spectrum_[i] * mult(xi, std::abs(xi[0]), grid_.is_nyquist(i));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const std::array<double, 2> xi{grid_.frequency(i), grid_.frequency(j)};
          const bool nyquist = grid_.is_nyquist(i) || grid_.is_nyquist(j);
          work_[i * n + j] = spectrum_[i * n + j] * mult(xi, std::hypot(xi[0], xi[1]), nyquist);
        }
      }
    }
    transform(work_, true);
    std::vector<double> out(work_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = work_[i].real();
    return out;
  }

  /// Transform of a complex array in place (1-D or row/column 2-D).
  void transform(std::vector<complex>& data, bool inverse) {
    const std::size_t n = grid_.n;
    auto run = [&](std::span<complex> s) { inverse ? fft_.inverse(s) : fft_.forward(s); };
    if (grid_.d == 1) {
      run(data);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) run(std::span<complex>(data.data() + i * n, n));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) line_[i] = data[i * n + j];
      run(line_);
      for (std::size_t i = 0; i < n; ++i) data[i * n + j] = line_[i];
    }
  }

 private:
  void check(const Grid& g) const {
    if (!(g == grid_)) throw domain_error("SpectralWorkspace: field grid differs from workspace grid");
  }

  Grid grid_;
  Fft fft_;
  std::vector<complex> spectrum_;
  std::vector<complex> work_;
  std::vector<complex> line_;
};

/// (-Delta)^{alpha/2} f via the multiplier |xi|^alpha.
inline Field frac_laplacian_spectral(const Field& f, double alpha, SpectralWorkspace& ws) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw domain_error("frac_laplacian_spectral: alpha must lie in (0, 2]");
  ws.load(f);
  return Field(f.grid, ws.apply([alpha](const std::array<double, 2>&, double abs_xi, bool nyquist) {
    return (nyquist || abs_xi == 0.0) ? std::complex<double>(0.0) : std::complex<double>(std::pow(abs_xi, alpha));
  }));
}

inline Field frac_laplacian_spectral(const Field& f, double alpha) {
  SpectralWorkspace ws(f.grid);
  return frac_laplacian_spectral(f, alpha, ws);
}

/// grad^beta f via the vector multiplier i xi_j |xi|^{beta-1}, beta in (-1, 1].
inline VectorField frac_gradient_spectral(const Field& f, double beta, SpectralWorkspace& ws) {
  if (!(beta > -1.0 && beta <= 1.0)) throw domain_error("frac_gradient_spectral: beta must lie in (-1, 1]");
  ws.load(f);
  VectorField out(f.grid);
  for (int j = 0; j < f.grid.d; ++j) {
    out.components[static_cast<std::size_t>(j)] =
        ws.apply([beta, j](const std::array<double, 2>& xi, double abs_xi, bool nyquist) {
          if (nyquist || abs_xi == 0.0) return std::complex<double>(0.0);
          return std::complex<double>(0.0, xi[static_cast<std::size_t>(j)] * std::pow(abs_xi, beta - 1.0));
        });
  }
  return out;
}

inline VectorField frac_gradient_spectral(const Field& f, double beta) {
  SpectralWorkspace ws(f.grid);
  return frac_gradient_spectral(f, beta, ws);
}

/// Spectral divergence sum_j i xi_j v_j.
inline Field divergence_spectral(const VectorField& v, SpectralWorkspace& ws) {
  Field out(v.grid);
  for (int j = 0; j < v.grid.d; ++j) {
    ws.load(Field(v.grid, v.components[static_cast<std::size_t>(j)]));
    const auto part = ws.apply([j](const std::array<double, 2>& xi, double abs_xi, bool nyquist) {
      if (nyquist || abs_xi == 0.0) return std::complex<double>(0.0);
      return std::complex<double>(0.0, xi[static_cast<std::size_t>(j)]);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += part[i];
  }
  return out;
}

inline Field divergence_spectral(const VectorField& v) {
  SpectralWorkspace ws(v.grid);
  return divergence_spectral(v, ws);
}

/// I_beta f via |xi|^{-beta}; the zero mode is dropped, so the result is I_beta(f - mean f)
/// up to periodization error.
inline Field riesz_potential_spectral(const Field& f, double beta, SpectralWorkspace& ws) {
  if (!(beta > 0.0 && beta < f.grid.d)) throw domain_error("riesz_potential_spectral: beta must lie in (0, d)");
  ws.load(f);
  return Field(f.grid, ws.apply([beta](const std::array<double, 2>&, double abs_xi, bool nyquist) {
    return (nyquist || abs_xi == 0.0) ? std::complex<double>(0.0) : std::complex<double>(std::pow(abs_xi, -beta));
  }));
}

inline Field riesz_potential_spectral(const Field& f, double beta) {
  SpectralWorkspace ws(f.grid);
  return riesz_potential_spectral(f, beta, ws);
}

/// exp(tau Delta) f, the exact heat flow over time tau (conserves the mean).
inline Field heat_flow_spectral(const Field& f, double tau, SpectralWorkspace& ws) {
  if (!(tau >= 0.0)) throw domain_error("heat_flow_spectral: tau must be >= 0");
  ws.load(f);
  return Field(f.grid, ws.apply([tau](const std::array<double, 2>&, double abs_xi, bool) {
    return std::complex<double>(std::exp(-tau * abs_xi * abs_xi));
  }));
}

}  // namespace nlpme
