#pragma once

#include <complex>

namespace mhdlab::fft {

/// Normalized forward 3-D transform of n^3 real samples (x fastest).
/// The output is made exactly Hermitian.
void forward(int n, const double* in, std::complex<double>* out);

/// Inverse 3-D transform; the imaginary part of the result is discarded.
void inverse(int n, const std::complex<double>* in, double* out);

/// Unnormalized complex-to-complex transforms, sign -1 (forward) or +1.
void c2c(int n, const std::complex<double>* in, std::complex<double>* out,
         int sign);

/// Force c(-m) = conj(c(m)) by averaging each conjugate pair.
void make_hermitian(int n, std::complex<double>* c);

}  // namespace mhdlab::fft
