#pragma once

// Finite sums  a * d^gamma exp(-sum_t (x_t - c_t)^2 / (2 s_t^2))  on the
// periodic cell, each bump read through the nearest periodic image. Closed
// under differentiation, so operator outputs are exact up to float addition.

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace hodc {

struct BumpKey {
    std::vector<double> center, sigma;
    std::vector<int> gamma;
    auto operator<=>(const BumpKey&) const = default;
    bool operator==(const BumpKey&) const = default;
};

inline double wrap_to_cell(double u) {
    // representative of u modulo 2pi in [-pi, pi)
    u = std::fmod(u + M_PI, 2.0 * M_PI);
    if (u < 0) u += 2.0 * M_PI;
    return u - M_PI;
}

/// m-th derivative of exp(-u^2/(2 s^2)) at u.
inline double gaussian_derivative(int m, double u, double s) {
    double z = u / s;
    double h0 = 1.0, h1 = z;
    double he = (m == 0) ? 1.0 : z;
    for (int j = 1; j < m; ++j) {
        double h2 = z * h1 - j * h0;
        h0 = h1;
        h1 = h2;
        he = h2;
    }
    return std::pow(-1.0 / s, m) * he * std::exp(-0.5 * z * z);
}

class BumpSeries {
public:
    using Terms = std::map<BumpKey, double>;

    BumpSeries() = default;
    explicit BumpSeries(int n) : n_(n) {}

    int nvars() const { return n_; }
    const Terms& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    BumpSeries zero_like() const { return BumpSeries(n_); }

    void add_bump(std::vector<double> center, std::vector<double> sigma, std::vector<int> gamma, double amp) {
        if (static_cast<int>(center.size()) != n_ || static_cast<int>(sigma.size()) != n_ ||
            static_cast<int>(gamma.size()) != n_)
            throw std::invalid_argument("BumpSeries: dimension mismatch");
        for (double s : sigma)
            if (!(s > 0)) throw std::invalid_argument("BumpSeries: widths must be positive");
        add(BumpKey{std::move(center), std::move(sigma), std::move(gamma)}, amp);
    }

    BumpSeries& operator+=(const BumpSeries& o) {
        check(o);
        for (const auto& [k, a] : o.terms_) add(k, a);
        return *this;
    }
    BumpSeries& operator-=(const BumpSeries& o) {
        check(o);
        for (const auto& [k, a] : o.terms_) add(k, -a);
        return *this;
    }
    void add_scaled(const BumpSeries& o, double s) {
        check(o);
        for (const auto& [k, a] : o.terms_) add(k, s * a);
    }
    BumpSeries& operator*=(double s) {
        if (s == 0.0) terms_.clear();
        for (auto& [k, a] : terms_) a *= s;
        return *this;
    }
    BumpSeries operator-() const {
        BumpSeries r = *this;
        r *= -1.0;
        return r;
    }

    BumpSeries derivative(const std::vector<int>& alpha) const {
        if (static_cast<int>(alpha.size()) != n_) throw std::invalid_argument("BumpSeries::derivative: bad multi-index");
        BumpSeries r(n_);
        for (const auto& [k, a] : terms_) {
            BumpKey k2 = k;
            for (int t = 0; t < n_; ++t) k2.gamma[static_cast<size_t>(t)] += alpha[static_cast<size_t>(t)];
            r.add(std::move(k2), a);
        }
        return r;
    }

    /// f(x) -> f(c + (x - c)/lambda).
    BumpSeries dilate(double lambda, const std::vector<double>& c) const {
        if (!(lambda > 0)) throw std::invalid_argument("BumpSeries::dilate: lambda must be positive");
        BumpSeries r(n_);
        for (const auto& [k, a] : terms_) {
            BumpKey k2 = k;
            int order = 0;
            for (int t = 0; t < n_; ++t) {
                size_t u = static_cast<size_t>(t);
                k2.center[u] = c[u] + lambda * (k.center[u] - c[u]);
                k2.sigma[u] = lambda * k.sigma[u];
                order += k.gamma[u];
            }
            r.add(std::move(k2), a * std::pow(lambda, order));
        }
        return r;
    }

    double eval(const std::vector<double>& x) const {
        double s = 0;
        for (const auto& [k, a] : terms_) {
            double v = a;
            for (int t = 0; t < n_; ++t) {
                size_t u = static_cast<size_t>(t);
                v *= gaussian_derivative(k.gamma[u], wrap_to_cell(x[u] - k.center[u]), k.sigma[u]);
            }
            s += v;
        }
        return s;
    }

    /// Accumulates the samples on the P^n grid into out (size P^n).
    void sample_into(int P, std::vector<double>& out) const {
        size_t total = 1;
        for (int t = 0; t < n_; ++t) total *= static_cast<size_t>(P);
        if (out.size() != total) out.assign(total, 0.0);
        std::vector<std::vector<double>> tab(static_cast<size_t>(n_), std::vector<double>(static_cast<size_t>(P)));
        const size_t outer = total / static_cast<size_t>(P);
        std::vector<int> idx(static_cast<size_t>(n_ > 1 ? n_ - 1 : 0), 0);
        for (const auto& [k, a] : terms_) {
            for (int t = 0; t < n_; ++t) {
                size_t u = static_cast<size_t>(t);
                for (int i = 0; i < P; ++i)
                    tab[u][static_cast<size_t>(i)] =
                        gaussian_derivative(k.gamma[u], wrap_to_cell(2.0 * M_PI * i / P - k.center[u]), k.sigma[u]);
            }
            std::fill(idx.begin(), idx.end(), 0);
            const auto& last = tab[static_cast<size_t>(n_ - 1)];
            for (size_t o = 0; o < outer; ++o) {
                double pre = a;
                for (int t = 0; t + 1 < n_; ++t) pre *= tab[static_cast<size_t>(t)][static_cast<size_t>(idx[static_cast<size_t>(t)])];
                double* dst = out.data() + o * static_cast<size_t>(P);
                if (pre != 0.0)
                    for (int i = 0; i < P; ++i) dst[i] += pre * last[static_cast<size_t>(i)];
                for (int t = n_ - 2; t >= 0; --t) {
                    if (++idx[static_cast<size_t>(t)] < P) break;
                    idx[static_cast<size_t>(t)] = 0;
                }
            }
        }
    }

    std::vector<double> sample(int P) const {
        std::vector<double> out;
        size_t total = 1;
        for (int t = 0; t < n_; ++t) total *= static_cast<size_t>(P);
        out.assign(total, 0.0);
        sample_into(P, out);
        return out;
    }

private:
    void add(BumpKey k, double a) {
        if (a == 0.0) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(std::move(k), a);
        } else {
            it->second += a;
            if (it->second == 0.0) terms_.erase(it);
        }
    }
    void check(const BumpSeries& o) const {
        if (o.n_ != n_) throw std::invalid_argument("BumpSeries: variable count mismatch");
    }

    int n_ = 0;
    Terms terms_;
};

}  // namespace hodc
