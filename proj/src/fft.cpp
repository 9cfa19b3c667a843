#include "mhdlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace mhdlab::fft {
namespace {

struct Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per size with FFTW_ESTIMATE so the chosen
// algorithm does not depend on timing measurements.
const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  fftw_complex* a = fftw_alloc_complex(total);
  fftw_complex* b = fftw_alloc_complex(total);
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  // fftw uses row-major (n0 slowest); our layout has x fastest, so axis 0
  // of the fftw plan is z. The transform is symmetric in the axes.
  p.fwd = fftw_plan_dft_3d(n, n, n, a, b, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_3d(n, n, n, a, b, FFTW_BACKWARD, flags);
  fftw_free(a);
  fftw_free(b);
  return cache.emplace(n, p).first->second;
}

}  // namespace

void c2c(int n, const std::complex<double>* in, std::complex<double>* out,
         int sign) {
  const Plans& p = plans_for(n);
  // out-of-place c2c plans preserve their input by default
  fftw_execute_dft(sign < 0 ? p.fwd : p.bwd,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void make_hermitian(int n, std::complex<double>* c) {
  auto conj_idx = [n](int i) { return (n - i) % n; };
  for (int k = 0; k < n; ++k) {
    const int kk = conj_idx(k);
    for (int j = 0; j < n; ++j) {
      const int jj = conj_idx(j);
      for (int i = 0; i < n; ++i) {
        const int ii = conj_idx(i);
        const std::size_t a = static_cast<std::size_t>(i) + n * (j + static_cast<std::size_t>(n) * k);
        const std::size_t b = static_cast<std::size_t>(ii) + n * (jj + static_cast<std::size_t>(n) * kk);
        if (b < a) continue;
        if (a == b) {
          c[a] = {c[a].real(), 0.0};
        } else {
          const double re = 0.5 * (c[a].real() + c[b].real());
          const double im = 0.5 * (c[a].imag() - c[b].imag());
          c[a] = {re, im};
          c[b] = {re, -im};
        }
      }
    }
  }
}

void forward(int n, const double* in, std::complex<double>* out) {
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<std::complex<double>> tmp(total);
  for (std::size_t i = 0; i < total; ++i) tmp[i] = {in[i], 0.0};
  c2c(n, tmp.data(), out, -1);
  const double s = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) out[i] *= s;
  make_hermitian(n, out);
}

void inverse(int n, const std::complex<double>* in, double* out) {
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<std::complex<double>> tmp(total);
  c2c(n, in, tmp.data(), +1);
  for (std::size_t i = 0; i < total; ++i) out[i] = tmp[i].real();
}

}  // namespace mhdlab::fft
