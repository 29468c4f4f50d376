#include "roughspde/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "roughspde/errors.hpp"

namespace rs::fft {

namespace {
// FFTW planning and plan destruction are not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealTransform::RealTransform(std::size_t n) : n_(n) {
  if (n < 2) throw ConfigError("RealTransform: length must be >= 2");
  real_buf_ = fftw_malloc(sizeof(double) * n);
  cplx_buf_ = fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1));
  if (!real_buf_ || !cplx_buf_) {
    if (real_buf_) fftw_free(real_buf_);
    if (cplx_buf_) fftw_free(cplx_buf_);
    throw NumericalError("RealTransform: allocation failed");
  }
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n),
                                   static_cast<double*>(real_buf_),
                                   static_cast<fftw_complex*>(cplx_buf_),
                                   FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                   static_cast<fftw_complex*>(cplx_buf_),
                                   static_cast<double*>(real_buf_),
                                   FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_inv_) throw NumericalError("RealTransform: planning failed");
}

void RealTransform::destroy() noexcept {
  if (plan_fwd_ || plan_inv_) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  }
  if (real_buf_) fftw_free(real_buf_);
  if (cplx_buf_) fftw_free(cplx_buf_);
  plan_fwd_ = plan_inv_ = real_buf_ = cplx_buf_ = nullptr;
}

RealTransform::~RealTransform() { destroy(); }

RealTransform::RealTransform(RealTransform&& other) noexcept
    : n_(other.n_),
      real_buf_(other.real_buf_),
      cplx_buf_(other.cplx_buf_),
      plan_fwd_(other.plan_fwd_),
      plan_inv_(other.plan_inv_) {
  other.real_buf_ = other.cplx_buf_ = other.plan_fwd_ = other.plan_inv_ = nullptr;
  other.n_ = 0;
}

RealTransform& RealTransform::operator=(RealTransform&& other) noexcept {
  if (this != &other) {
    destroy();
    n_ = other.n_;
    real_buf_ = other.real_buf_;
    cplx_buf_ = other.cplx_buf_;
    plan_fwd_ = other.plan_fwd_;
    plan_inv_ = other.plan_inv_;
    other.real_buf_ = other.cplx_buf_ = other.plan_fwd_ = other.plan_inv_ = nullptr;
    other.n_ = 0;
  }
  return *this;
}

void RealTransform::forward(const double* in, std::complex<double>* out) {
  std::memcpy(real_buf_, in, sizeof(double) * n_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out, cplx_buf_, sizeof(fftw_complex) * spectrum_size());
}

void RealTransform::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(cplx_buf_, in, sizeof(fftw_complex) * spectrum_size());
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  std::memcpy(out, real_buf_, sizeof(double) * n_);
}

void RealTransform::forward(const std::vector<double>& in,
                            std::vector<std::complex<double>>& out) {
  if (in.size() != n_) throw ConfigError("RealTransform::forward: size mismatch");
  out.resize(spectrum_size());
  forward(in.data(), out.data());
}

void RealTransform::inverse(const std::vector<std::complex<double>>& in,
                            std::vector<double>& out) {
  if (in.size() != spectrum_size()) throw ConfigError("RealTransform::inverse: size mismatch");
  out.resize(n_);
  inverse(in.data(), out.data());
}

}  // namespace rs::fft
