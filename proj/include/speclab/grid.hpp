#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace speclab {

// Truncation conventions for periodic fields on [0,1)^d.
//
// galerkin:    modes |k|_inf <= N are kept; nonlinear terms are evaluated on an
//              oversampled M-point grid (M >= 3(2N+1)) so their projections are
//              exact convolutions.
// collocation: N even, M = N; the retained wavenumbers are k in (-N/2, N/2]
//              (the +N/2 mode carries the shared Nyquist coefficient) and
//              nonlinearities act pointwise on the N nodes, aliasing included.
enum class Convention { galerkin, collocation };

// Smallest 2^a 3^b 5^c >= n (sizes FFTW handles at O(n log n) with good constants).
int next_fast_size(int n);

struct GridSpec {
    int d = 1;
    int N = 0;
    int M = 0;
    Convention convention = Convention::galerkin;

    static GridSpec make_galerkin(int d, int N, int M = 0);
    static GridSpec make_collocation(int d, int N);

    std::int64_t points() const {
        std::int64_t p = 1;
        for (int i = 0; i < d; ++i) p *= M;
        return p;
    }

    // Signed wavenumber for DFT slot m on one axis.
    int wavenumber(int m) const { return m <= M / 2 ? m : m - M; }
    // DFT slot for signed wavenumber k on one axis.
    int slot(int k) const { return k >= 0 ? k : k + M; }

    // Largest |k| representable without hitting the ambiguous Nyquist pair.
    int max_representable() const {
        return convention == Convention::collocation ? M / 2 : (M - 1) / 2;
    }

    bool operator==(const GridSpec& o) const {
        return d == o.d && N == o.N && M == o.M && convention == o.convention;
    }
};

}  // namespace speclab
