#pragma once

#include <vector>

#include "thz/types.hpp"

namespace thz {

// In-place complex FFT (FFTW backend, ESTIMATE plans, cached per size).
// Forward is unscaled; inverse is scaled by 1/N.
void fft(std::vector<cplx>& x);
void ifft(std::vector<cplx>& x);

}  // namespace thz
