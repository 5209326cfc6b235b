#pragma once

// Real samples on the uniform P^n grid of [0,2pi)^n, axis 0 slowest.
// Derivatives are spectral.

#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fft.hpp"

namespace hodc {

class GridField {
public:
    GridField() = default;
    GridField(int n, int P) : n_(n), P_(P) {
        if (n < 1) throw std::invalid_argument("GridField: n must be >= 1");
        if (P < 2 || (P & (P - 1)) != 0) throw std::invalid_argument("GridField: P must be a power of two");
        size_t total = 1;
        for (int t = 0; t < n; ++t) total *= static_cast<size_t>(P);
        data_.assign(total, 0.0);
    }
    GridField(int n, int P, std::vector<double> samples) : GridField(n, P) {
        if (samples.size() != data_.size()) throw std::invalid_argument("GridField: sample count mismatch");
        for (double v : samples)
            if (!std::isfinite(v)) throw std::invalid_argument("GridField: non-finite sample");
        data_ = std::move(samples);
    }

    int nvars() const { return n_; }
    int resolution() const { return P_; }
    size_t size() const { return data_.size(); }
    const std::vector<double>& samples() const { return data_; }
    std::vector<double>& samples() { return data_; }
    double operator[](size_t i) const { return data_[i]; }
    double& operator[](size_t i) { return data_[i]; }

    GridField zero_like() const { return GridField(n_, P_); }
    bool is_zero() const {
        for (double v : data_)
            if (v != 0.0) return false;
        return true;
    }

    double coord(int i) const { return 2.0 * M_PI * i / P_; }

    GridField& operator+=(const GridField& o) {
        check(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        check(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    void add_scaled(const GridField& o, double s) {
        check(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
    }
    GridField& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    GridField operator-() const {
        GridField r = *this;
        r *= -1.0;
        return r;
    }
    friend GridField operator*(const GridField& a, const GridField& b) {
        a.check(b);
        GridField r = a;
        for (size_t i = 0; i < r.data_.size(); ++i) r.data_[i] *= b.data_[i];
        return r;
    }

    double mean() const { return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size()); }
    double max_abs() const {
        double m = 0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    friend double integral_product(const GridField& a, const GridField& b) {
        a.check(b);
        double s = 0;
        for (size_t i = 0; i < a.data_.size(); ++i) s += a.data_[i] * b.data_[i];
        return s / static_cast<double>(a.data_.size());
    }

    std::vector<fft::cplx> spectrum() const {
        std::vector<fft::cplx> z(data_.begin(), data_.end());
        fft::forward(z, n_, P_);
        return z;
    }

    /// Multiplies every mode by the value of `mult(wavenumbers)` and transforms back.
    template <class F>
    GridField apply_multiplier(const std::vector<fft::cplx>& spec, F&& mult) const {
        std::vector<fft::cplx> z(spec);
        std::vector<int> idx(static_cast<size_t>(n_), 0), w(static_cast<size_t>(n_));
        for (size_t p = 0; p < z.size(); ++p) {
            for (int t = 0; t < n_; ++t) w[static_cast<size_t>(t)] = fft::wavenumber(idx[static_cast<size_t>(t)], P_);
            z[p] *= mult(w);
            advance(idx);
        }
        fft::backward(z, n_, P_);
        GridField r(n_, P_);
        for (size_t p = 0; p < z.size(); ++p) r.data_[p] = z[p].real();
        return r;
    }

    GridField derivative_from_spectrum(const std::vector<fft::cplx>& spec, const std::vector<int>& alpha) const {
        if (static_cast<int>(alpha.size()) != n_) throw std::invalid_argument("GridField::derivative: bad multi-index");
        const int nyq = -P_ / 2;
        return apply_multiplier(spec, [&](const std::vector<int>& w) {
            fft::cplx m = 1.0;
            for (int t = 0; t < n_; ++t) {
                int a = alpha[static_cast<size_t>(t)];
                if (a == 0) continue;
                int wt = w[static_cast<size_t>(t)];
                if ((a & 1) && wt == nyq) return fft::cplx(0.0);
                fft::cplx ik(0.0, static_cast<double>(wt));
                for (int e = 0; e < a; ++e) m *= ik;
            }
            return m;
        });
    }

    GridField derivative(const std::vector<int>& alpha) const {
        bool trivial = true;
        for (int a : alpha) trivial = trivial && a == 0;
        if (static_cast<int>(alpha.size()) != n_) throw std::invalid_argument("GridField::derivative: bad multi-index");
        if (trivial) return *this;
        return derivative_from_spectrum(spectrum(), alpha);
    }

    /// Trigonometric interpolant evaluated at arbitrary points y (each of length n).
    std::vector<double> interpolate(const std::vector<fft::cplx>& spec, const std::vector<std::vector<double>>& pts) const {
        std::vector<double> out(pts.size(), 0.0);
        const double norm = 1.0 / static_cast<double>(data_.size());
        std::vector<std::vector<fft::cplx>> tab(static_cast<size_t>(n_), std::vector<fft::cplx>(static_cast<size_t>(P_)));
        for (size_t q = 0; q < pts.size(); ++q) {
            for (int t = 0; t < n_; ++t)
                for (int i = 0; i < P_; ++i) {
                    double th = fft::wavenumber(i, P_) * pts[q][static_cast<size_t>(t)];
                    tab[static_cast<size_t>(t)][static_cast<size_t>(i)] = {std::cos(th), std::sin(th)};
                }
            // contract the last axis first
            std::vector<fft::cplx> cur(spec);
            size_t block = cur.size();
            for (int t = n_ - 1; t >= 0; --t) {
                block /= static_cast<size_t>(P_);
                std::vector<fft::cplx> nxt(block, 0.0);
                for (size_t b = 0; b < block; ++b) {
                    fft::cplx s = 0.0;
                    for (int i = 0; i < P_; ++i) s += cur[b * static_cast<size_t>(P_) + static_cast<size_t>(i)] * tab[static_cast<size_t>(t)][static_cast<size_t>(i)];
                    nxt[b] = s;
                }
                cur.swap(nxt);
            }
            out[q] = cur[0].real() * norm;
        }
        return out;
    }

    void advance(std::vector<int>& idx) const {
        for (int t = n_ - 1; t >= 0; --t) {
            if (++idx[static_cast<size_t>(t)] < P_) return;
            idx[static_cast<size_t>(t)] = 0;
        }
    }

    template <class F>
    static GridField from_function(int n, int P, F&& f) {
        GridField g(n, P);
        std::vector<int> idx(static_cast<size_t>(n), 0);
        std::vector<double> x(static_cast<size_t>(n));
        for (size_t p = 0; p < g.data_.size(); ++p) {
            for (int t = 0; t < n; ++t) x[static_cast<size_t>(t)] = g.coord(idx[static_cast<size_t>(t)]);
            g.data_[p] = f(x);
            g.advance(idx);
        }
        return g;
    }

private:
    void check(const GridField& o) const {
        if (o.n_ != n_ || o.P_ != P_) throw std::invalid_argument("GridField: shape mismatch");
    }

    int n_ = 0, P_ = 0;
    std::vector<double> data_;
};

/// Spectral derivatives of one field for many multi-indices, sharing the forward transform.
inline std::vector<GridField> derivatives(const GridField& f, const std::vector<std::vector<int>>& alphas) {
    std::vector<GridField> out;
    out.reserve(alphas.size());
    auto spec = f.spectrum();
    for (const auto& a : alphas) out.push_back(f.derivative_from_spectrum(spec, a));
    return out;
}

}  // namespace hodc
