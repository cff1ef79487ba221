#pragma once

#include <complex>

namespace semitorus::fourier {

// Unnormalised in-place-capable DFT of a d-dimensional N^d array, row-major.
// sign = -1 forward, +1 backward. Plans are cached and shared.
void transform(int d, int n, int sign, const std::complex<double>* in, std::complex<double>* out);

}  // namespace semitorus::fourier
