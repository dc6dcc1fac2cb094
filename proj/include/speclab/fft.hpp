#pragma once

#include <complex>
#include <vector>

namespace speclab {

// Thin wrapper around FFTW complex transforms with a process-wide plan cache.
// Plans are created with FFTW_ESTIMATE so repeated runs are bit-identical
// (measured planning can pick different algorithms run to run).
//
// Layout: row-major rank-d array with every axis of length `n`.
// forward:  out_k = (1/n^d) sum_j in_j exp(-2*pi*i*k.j/n)   (normalized DFT)
// backward: out_j =         sum_k in_k exp(+2*pi*i*k.j/n)   (unnormalized)
// so backward(forward(x)) == x.

void fft_forward(int d, int n, std::vector<std::complex<double>>& data);
void fft_backward(int d, int n, std::vector<std::complex<double>>& data);

}  // namespace speclab
