#pragma once

// Trigonometric interpolation of equispaced periodic samples on [0, 2*pi).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace slitmap::spectral {

using Complex = std::complex<double>;

/// Signed wavenumber of DFT bin k for an N-point transform (N even).
/// The Nyquist bin N/2 is reported as +N/2.
inline int wavenumber(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(n);
}

/// Fourier coefficients c_k with f(t_j) = sum_k c_k exp(i k t_j).
inline std::vector<Complex> coefficients(std::span<const Complex> samples) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(samples.begin(), samples.end());
  std::vector<Complex> out;
  fft.fwd(out, in);
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& c : out) c *= scale;
  return out;
}

inline std::vector<Complex> samples_from(std::span<const Complex> coeffs) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(coeffs.begin(), coeffs.end());
  std::vector<Complex> out;
  fft.inv(out, in);
  const double scale = static_cast<double>(coeffs.size());
  for (auto& c : out) c *= scale;
  return out;
}

/// Multiplier applied to bin k for an `order`-th derivative. The Nyquist mode
/// is the real cosine cos(N t / 2); odd derivatives of it vanish at the nodes.
inline Complex derivative_factor(std::size_t k, std::size_t n, int order) {
  const int w = wavenumber(k, n);
  if (order == 0) return 1.0;
  if (2 * k == n) {
    if (order % 2 == 1) return 0.0;
    const double q = -static_cast<double>(w) * w;
    return std::pow(q, order / 2);
  }
  return std::pow(Complex(0.0, static_cast<double>(w)), order);
}

/// Samples of the `order`-th t-derivative of the interpolant.
inline std::vector<Complex> derivative(std::span<const Complex> samples, int order = 1) {
  auto c = coefficients(samples);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= derivative_factor(k, c.size(), order);
  return samples_from(c);
}

inline std::vector<double> derivative(std::span<const double> samples, int order = 1) {
  std::vector<Complex> z(samples.begin(), samples.end());
  auto d = derivative(std::span<const Complex>(z), order);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

/// Resample the interpolant on factor*N equispaced points.
inline std::vector<Complex> upsample(std::span<const Complex> samples, std::size_t factor) {
  const std::size_t n = samples.size();
  if (factor <= 1) return {samples.begin(), samples.end()};
  auto c = coefficients(samples);
  std::vector<Complex> padded(n * factor, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    const int w = wavenumber(k, n);
    if (2 * k == n) {
      // split the Nyquist cosine evenly between +N/2 and -N/2
      padded[n / 2] += 0.5 * c[k];
      padded[n * factor - n / 2] += 0.5 * c[k];
    } else {
      const std::size_t idx = w >= 0 ? static_cast<std::size_t>(w)
                                     : n * factor - static_cast<std::size_t>(-w);
      padded[idx] += c[k];
    }
  }
  return samples_from(padded);
}

/// Evaluable trigonometric interpolant of one periodic sample set.
class Interpolant {
 public:
  Interpolant() = default;
  explicit Interpolant(std::span<const Complex> samples) : c_(coefficients(samples)) {}
  explicit Interpolant(std::span<const double> samples)
      : Interpolant(std::span<const Complex>(std::vector<Complex>(samples.begin(), samples.end()))) {}

  std::size_t size() const { return c_.size(); }

  /// Value of the `order`-th derivative at parameter t.
  Complex operator()(double t, int order = 0) const {
    const std::size_t n = c_.size();
    Complex sum{};
    for (std::size_t k = 0; k < n; ++k) {
      const int w = wavenumber(k, n);
      if (2 * k == n) {
        // cos(w t) and its derivatives
        const double wt = w * t;
        double v = 0.0;
        switch (((order % 4) + 4) % 4) {
          case 0: v = std::cos(wt); break;
          case 1: v = -std::sin(wt); break;
          case 2: v = -std::cos(wt); break;
          default: v = std::sin(wt); break;
        }
        sum += c_[k] * v * std::pow(static_cast<double>(w), order);
      } else {
        sum += c_[k] * std::pow(Complex(0.0, static_cast<double>(w)), order) *
               std::polar(1.0, w * t);
      }
    }
    return sum;
  }

 private:
  std::vector<Complex> c_;
};

inline double node_parameter(std::size_t j, std::size_t n) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
}

}  // namespace slitmap::spectral
