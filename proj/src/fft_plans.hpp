#pragma once

// FFTW plan cache. Planning is serialized behind a mutex; execution through
// the new-array interface is safe from concurrent workers.

#include <complex>
#include <fftw3.h>

namespace cgle::detail {

struct FftPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

/// 2D complex transform over a pt x px row-major array (x fastest).
const FftPair& plans_2d(int pt, int px);

/// 1D complex transform of length n.
const FftPair& plans_1d(int n);

inline void execute(fftw_plan p, const std::complex<double>* in, std::complex<double>* out) {
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace cgle::detail
