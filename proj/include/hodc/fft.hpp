#pragma once

// Cached in-place FFTW plans over P^n complex grids.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace hodc::fft {

using cplx = std::complex<double>;

namespace detail {
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;
    ~PlanCache() {
        for (auto& [k, p] : plans) fftw_destroy_plan(p);
    }
};

inline PlanCache& cache() {
    static PlanCache c;
    return c;
}

inline fftw_plan plan(int n, int P, int sign) {
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto key = std::make_tuple(n, P, sign);
    auto it = c.plans.find(key);
    if (it != c.plans.end()) return it->second;
    size_t total = 1;
    for (int t = 0; t < n; ++t) total *= static_cast<size_t>(P);
    std::vector<cplx> scratch(total);
    std::vector<int> dims(static_cast<size_t>(n), P);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft(n, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw: planning failed");
    c.plans.emplace(key, p);
    return p;
}
}  // namespace detail

/// Unnormalized forward transform, in place.
inline void forward(std::vector<cplx>& data, int n, int P) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::plan(n, P, FFTW_FORWARD), buf, buf);
}

/// Inverse transform including the 1/P^n factor, in place.
inline void backward(std::vector<cplx>& data, int n, int P) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::plan(n, P, FFTW_BACKWARD), buf, buf);
    const double s = 1.0 / static_cast<double>(data.size());
    for (auto& z : data) z *= s;
}

/// Signed wavenumber of FFT bin i.
inline int wavenumber(int i, int P) { return i <= P / 2 - 1 ? i : i - P; }

}  // namespace hodc::fft
