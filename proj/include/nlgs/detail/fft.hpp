#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace nlgs::detail {

using Complex = std::complex<double>;

// Owns a pair of FFTW plans for one (dim, n) shape. Plans are created with
// FFTW_UNALIGNED so they can be executed on any std::vector buffer.
class FftPlan {
 public:
  FftPlan(int dim, std::size_t n) : dim_(dim), n_(n) {
    std::array<int, 3> shape{static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
    std::size_t total = 1;
    for (int k = 0; k < dim; ++k) total *= n;
    std::vector<Complex> scratch_in(total), scratch_out(total);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(dim, shape.data(), in, out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(dim, shape.data(), in, out, FFTW_BACKWARD, flags);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // Unnormalized transforms; fftw_execute_dft is thread-safe on distinct buffers.
  void forward(std::span<const Complex> in, std::span<Complex> out) const {
    fftw_execute_dft(forward_, const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
  void backward(std::span<const Complex> in, std::span<Complex> out) const {
    fftw_execute_dft(backward_, const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }

 private:
  int dim_;
  std::size_t n_;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

// Process-wide plan cache. Planning is not thread-safe in FFTW, execution is.
inline const FftPlan& plan_for(int dim, std::size_t n) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::size_t>, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, n}];
  if (!slot) slot = std::make_unique<FftPlan>(dim, n);
  return *slot;
}

}  // namespace nlgs::detail
