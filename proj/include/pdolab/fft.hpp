#pragma once
// Thin wrapper over FFTW: unnormalized multi-axis DFTs of complex data with
// every axis of equal length G. Plans are cached per (rank, G, sign) under a
// mutex; execution uses the new-array interface so cached plans are safe to
// reuse from worker threads.

#include <complex>
#include <vector>

namespace pdolab::fft {

/// In-place unnormalized DFT over all `rank` axes of a row-major array with
/// extent G per axis. sign = -1 gives sum_j a_j e^{-2 pi i jk / G} per axis,
/// sign = +1 the conjugate kernel. No scaling is applied.
void dft(std::vector<std::complex<double>>& data, int rank, int G, int sign);

}  // namespace pdolab::fft
