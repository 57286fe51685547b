// Thin FFTW wrapper: unnormalised in-place-capable transforms with a
// process-wide plan cache. Execution is thread-safe; planning is serialised.
#pragma once

#include <complex>
#include <cstddef>

namespace biharmonic::fft {

// out[k] = sum_j in[j] e^{-2 pi i jk/n}
void forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);
// out[j] = sum_k in[k] e^{+2 pi i jk/n}
void backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

}  // namespace biharmonic::fft
