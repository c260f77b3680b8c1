#pragma once

#include "landau/types.hpp"

namespace landau::fft {

// Unnormalized complex DFT of length n, out-of-place. `sign` is -1 for the
// forward transform (e^{-2 pi i jm/n}) and +1 for the backward one.
// Plans are created once per (n, sign) and shared between threads.
void transform(const cplx* in, cplx* out, int n, int sign);

}  // namespace landau::fft
