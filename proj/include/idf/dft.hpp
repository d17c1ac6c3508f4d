#pragma once

#include <complex>
#include <vector>

namespace idf::dft {

// In-place complex DFT, any length. Inverse includes the 1/N factor so that
// inverse(forward(x)) == x. Thread-safe (FFTW plans are cached under a lock,
// execution uses per-call buffers).
void transform(std::vector<std::complex<double>>& data, bool inverse);

// In-place 2-D complex DFT on a row-major w x h buffer.
void transform2d(std::vector<std::complex<double>>& data, int w, int h, bool inverse);

}  // namespace idf::dft
