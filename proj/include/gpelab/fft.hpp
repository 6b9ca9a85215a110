#pragma once

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "gpelab/grid.hpp"

namespace gpelab {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

/// Complex in-place FFT of fixed size.  Plans are created with FFTW_ESTIMATE
/// so results are reproducible bit-for-bit across runs.
class Fft {
 public:
  explicit Fft(int n) : n_(n), buf_(fftw_alloc_complex(n)) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  void forward(cplx* data) const {
    auto* b = reinterpret_cast<cplx*>(buf_);
    std::copy(data, data + n_, b);
    fftw_execute(fwd_);
    std::copy(b, b + n_, data);
  }

  /// Inverse transform including the 1/n normalization.
  void backward(cplx* data) const {
    auto* b = reinterpret_cast<cplx*>(buf_);
    std::copy(data, data + n_, b);
    fftw_execute(bwd_);
    double inv = 1.0 / n_;
    for (int i = 0; i < n_; ++i) data[i] = b[i] * inv;
  }

 private:
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

/// Wavenumber of FFT bin j on [-L, L): k_j = pi m / L with m the signed mode.
inline double fft_wavenumber(int j, int n, double half_width) {
  int m = (j <= n / 2) ? j : j - n;
  constexpr double pi = 3.14159265358979323846;
  return pi * m / half_width;
}

}  // namespace gpelab
