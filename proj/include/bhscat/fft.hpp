#pragma once

#include "bhscat/util.hpp"

namespace bhscat::fftutil {

/// Unnormalized in-place complex DFT over a rank-d array stored x-fastest with
/// dims {n0, n1, n2}. sign is -1 (forward) or +1 (backward). Plans are cached
/// per (dims, sign) behind a mutex; execution on caller buffers is concurrent.
void dft(cplx* data, const std::array<int, 3>& dims, int rank, int sign);

}  // namespace bhscat::fftutil
