#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rs::fft {

// Real<->complex transform of fixed length n, FFTW convention and
// normalization: inverse(forward(x)) == n * x. Instances own their aligned
// buffers and plans, so use one instance per thread. Planning (and plan
// destruction) is serialized internally; execution is lock-free.
class RealTransform {
 public:
  explicit RealTransform(std::size_t n);
  ~RealTransform();
  RealTransform(const RealTransform&) = delete;
  RealTransform& operator=(const RealTransform&) = delete;
  RealTransform(RealTransform&& other) noexcept;
  RealTransform& operator=(RealTransform&& other) noexcept;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  // out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0 .. n/2.
  void forward(const double* in, std::complex<double>* out);
  // Unnormalized inverse. The spectrum is copied to an internal buffer first,
  // so `in` survives FFTW's destructive c2r transform.
  void inverse(const std::complex<double>* in, double* out);

  void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out);
  void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out);

 private:
  void destroy() noexcept;

  std::size_t n_ = 0;
  void* real_buf_ = nullptr;  // fftw-aligned double[n]
  void* cplx_buf_ = nullptr;  // fftw-aligned complex[n/2+1]
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
};

}  // namespace rs::fft
