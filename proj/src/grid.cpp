#include "speclab/grid.hpp"

namespace speclab {

int next_fast_size(int n) {
    if (n < 1) return 1;
    for (int m = n;; ++m) {
        int r = m;
        while (r % 2 == 0) r /= 2;
        while (r % 3 == 0) r /= 3;
        while (r % 5 == 0) r /= 5;
        if (r == 1) return m;
    }
}

GridSpec GridSpec::make_galerkin(int d, int N, int M) {
    if (d < 1 || d > 3) throw std::invalid_argument("grid: dimension must be 1, 2, or 3");
    if (N < 0) throw std::invalid_argument("grid: cutoff must be nonnegative");
    int min_M = 3 * (2 * N + 1);  // cubic of a degree-N field truncates alias-free
    GridSpec g;
    g.d = d;
    g.N = N;
    g.M = M == 0 ? next_fast_size(min_M) : M;
    g.convention = Convention::galerkin;
    if (g.M < min_M)
        throw std::invalid_argument("grid: M must be at least 3(2N+1) for exact cubic dealiasing");
    return g;
}

GridSpec GridSpec::make_collocation(int d, int N) {
    if (d < 1 || d > 3) throw std::invalid_argument("grid: dimension must be 1, 2, or 3");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("grid: collocation needs even N >= 2");
    GridSpec g;
    g.d = d;
    g.N = N;
    g.M = N;
    g.convention = Convention::collocation;
    return g;
}

}  // namespace speclab
