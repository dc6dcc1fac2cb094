#include "speclab/fft.hpp"

#include <fftw3.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace speclab {
namespace {

// Planning is not thread-safe in FFTW; executing distinct buffers is.
std::mutex plan_mutex;

fftw_plan cached_plan(int d, int n, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(d, n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    int dims[3] = {n, n, n};
    // FFTW_UNALIGNED lets the plan run on any caller buffer; FFTW_ESTIMATE
    // keeps the chosen algorithm deterministic across runs.
    fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(total));
    if (!scratch) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft(d, dims, scratch, scratch, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(key, p);
    return p;
}

void run(int d, int n, int sign, std::vector<std::complex<double>>& data) {
    if (d < 1 || d > 3) throw std::invalid_argument("fft: dimension must be 1, 2, or 3");
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    if (static_cast<std::int64_t>(data.size()) != total)
        throw std::invalid_argument("fft: buffer size does not match grid");
    fftw_plan p = cached_plan(d, n, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
    if (sign == FFTW_FORWARD) {
        double scale = 1.0 / static_cast<double>(total);
        for (auto& z : data) z *= scale;
    }
}

}  // namespace

void fft_forward(int d, int n, std::vector<std::complex<double>>& data) {
    run(d, n, FFTW_FORWARD, data);
}

void fft_backward(int d, int n, std::vector<std::complex<double>>& data) {
    run(d, n, FFTW_BACKWARD, data);
}

}  // namespace speclab
