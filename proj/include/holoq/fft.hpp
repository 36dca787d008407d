#pragma once
#include <complex>

namespace holoq::detail {

// In-place unnormalized complex DFT on a contiguous row-major block.
// n1 == 1 selects a 1D transform of length n0. sign: -1 forward, +1 backward.
// Thread-safe; plans are cached per shape behind a mutex, execution is concurrent.
void fft_inplace(std::complex<double>* data, int n0, int n1, int sign);

// In-place unnormalized DFT along one axis of an n-by-n block stored with
// axis 0 contiguous (flat = i0 + n*i1): n independent length-n transforms.
void fft_axis_inplace(std::complex<double>* data, int n, int axis, int sign);

}  // namespace holoq::detail
