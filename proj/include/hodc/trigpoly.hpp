#pragma once

// Exact trigonometric polynomials on the torus [0,2pi)^n with rational
// amplitudes: sum of a * cos(w.x) and a * sin(w.x).

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hodc {

enum class Phase : int { cos = 0, sin = 1 };

struct TrigKey {
    std::vector<int> freq;
    Phase phase = Phase::cos;
    auto operator<=>(const TrigKey&) const = default;
    bool operator==(const TrigKey&) const = default;
};

class TrigPoly {
public:
    using Terms = std::map<TrigKey, mpq_class>;

    TrigPoly() = default;
    explicit TrigPoly(int n) : n_(n) {
        if (n < 0) throw std::invalid_argument("TrigPoly: negative variable count");
    }

    static TrigPoly constant(int n, const mpq_class& c) {
        TrigPoly p(n);
        p.add_term(std::vector<int>(static_cast<size_t>(n), 0), Phase::cos, c);
        return p;
    }
    static TrigPoly cos_mode(std::vector<int> w, const mpq_class& a = 1) {
        TrigPoly p(static_cast<int>(w.size()));
        p.add_term(std::move(w), Phase::cos, a);
        return p;
    }
    static TrigPoly sin_mode(std::vector<int> w, const mpq_class& a = 1) {
        TrigPoly p(static_cast<int>(w.size()));
        p.add_term(std::move(w), Phase::sin, a);
        return p;
    }

    int nvars() const { return n_; }
    const Terms& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    TrigPoly zero_like() const { return TrigPoly(n_); }

    /// Adds a*cos(w.x) or a*sin(w.x); w is brought to canonical sign first.
    void add_term(std::vector<int> w, Phase ph, const mpq_class& a) {
        if (static_cast<int>(w.size()) != n_) throw std::invalid_argument("TrigPoly: frequency length mismatch");
        if (sgn(a) == 0) return;
        mpq_class amp = a;
        int lead = 0;
        for (int v : w)
            if (v != 0) {
                lead = v;
                break;
            }
        if (lead == 0 && ph == Phase::sin) return;
        if (lead < 0) {
            for (int& v : w) v = -v;
            if (ph == Phase::sin) amp = -amp;
        }
        TrigKey key{std::move(w), ph};
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(std::move(key), amp);
        } else {
            it->second += amp;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    TrigPoly& operator+=(const TrigPoly& o) {
        check(o);
        for (const auto& [k, a] : o.terms_) add_term(k.freq, k.phase, a);
        return *this;
    }
    TrigPoly& operator-=(const TrigPoly& o) {
        check(o);
        for (const auto& [k, a] : o.terms_) add_term(k.freq, k.phase, -a);
        return *this;
    }
    void add_scaled(const TrigPoly& o, int s) {
        check(o);
        for (const auto& [k, a] : o.terms_) add_term(k.freq, k.phase, a * s);
    }
    void add_scaled(const TrigPoly& o, const mpq_class& s) {
        check(o);
        if (sgn(s) == 0) return;
        for (const auto& [k, a] : o.terms_) add_term(k.freq, k.phase, a * s);
    }
    TrigPoly& operator*=(const mpq_class& s) {
        if (sgn(s) == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, a] : terms_) a *= s;
        return *this;
    }
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(TrigPoly a, const mpq_class& s) { return a *= s; }
    TrigPoly operator-() const {
        TrigPoly r = *this;
        for (auto& [k, a] : r.terms_) a = -a;
        return r;
    }
    bool operator==(const TrigPoly& o) const { return n_ == o.n_ && terms_ == o.terms_; }

    /// Mixed partial d^alpha; alpha has length nvars().
    TrigPoly derivative(const std::vector<int>& alpha) const {
        if (static_cast<int>(alpha.size()) != n_) throw std::invalid_argument("TrigPoly::derivative: bad multi-index");
        int order = 0;
        for (int a : alpha) order += a;
        TrigPoly r(n_);
        for (const auto& [k, a] : terms_) {
            mpz_class mult = 1;
            for (int t = 0; t < n_; ++t)
                for (int e = 0; e < alpha[static_cast<size_t>(t)]; ++e) mult *= k.freq[static_cast<size_t>(t)];
            if (mult == 0) continue;
            // cos -> -sin -> -cos -> sin -> cos
            Phase ph = k.phase;
            int sign = 1;
            for (int s = 0; s < order; ++s) {
                if (ph == Phase::cos) {
                    ph = Phase::sin;
                    sign = -sign;
                } else {
                    ph = Phase::cos;
                }
            }
            r.add_term(k.freq, ph, a * mpq_class(mult) * sign);
        }
        return r;
    }

    friend TrigPoly operator*(const TrigPoly& x, const TrigPoly& y) {
        x.check(y);
        TrigPoly r(x.n_);
        const mpq_class half(1, 2);
        std::vector<int> sum(static_cast<size_t>(x.n_)), dif(static_cast<size_t>(x.n_));
        for (const auto& [ka, a] : x.terms_)
            for (const auto& [kb, b] : y.terms_) {
                for (size_t t = 0; t < sum.size(); ++t) {
                    sum[t] = ka.freq[t] + kb.freq[t];
                    dif[t] = ka.freq[t] - kb.freq[t];
                }
                mpq_class c = a * b * half;
                if (ka.phase == Phase::cos && kb.phase == Phase::cos) {
                    r.add_term(dif, Phase::cos, c);
                    r.add_term(sum, Phase::cos, c);
                } else if (ka.phase == Phase::sin && kb.phase == Phase::sin) {
                    r.add_term(dif, Phase::cos, c);
                    r.add_term(sum, Phase::cos, -c);
                } else if (ka.phase == Phase::sin) {
                    r.add_term(sum, Phase::sin, c);
                    r.add_term(dif, Phase::sin, c);
                } else {
                    r.add_term(sum, Phase::sin, c);
                    r.add_term(dif, Phase::sin, -c);
                }
            }
        return r;
    }

    /// Mean over the torus.
    mpq_class mean() const {
        auto it = terms_.find(TrigKey{std::vector<int>(static_cast<size_t>(n_), 0), Phase::cos});
        return it == terms_.end() ? mpq_class(0) : it->second;
    }

    /// (2pi)^-n times the integral of x*y over the torus.
    friend mpq_class integral_product(const TrigPoly& x, const TrigPoly& y) {
        x.check(y);
        mpq_class s = 0;
        const TrigPoly& small = x.size() <= y.size() ? x : y;
        const TrigPoly& big = x.size() <= y.size() ? y : x;
        for (const auto& [k, a] : small.terms_) {
            auto it = big.terms_.find(k);
            if (it == big.terms_.end()) continue;
            bool zero = true;
            for (int v : k.freq) zero = zero && v == 0;
            mpq_class t = a * it->second;
            if (!zero) t /= 2;
            s += t;
        }
        return s;
    }

    int bandwidth() const {
        int b = 0;
        for (const auto& [k, a] : terms_)
            for (int v : k.freq) b = std::max(b, std::abs(v));
        return b;
    }

    double eval(const std::vector<double>& x) const {
        double s = 0;
        for (const auto& [k, a] : terms_) {
            double arg = 0;
            for (size_t t = 0; t < x.size(); ++t) arg += k.freq[t] * x[t];
            s += a.get_d() * (k.phase == Phase::cos ? std::cos(arg) : std::sin(arg));
        }
        return s;
    }

    /// Values on the P^n grid x_t = 2 pi i_t / P, axis 0 slowest.
    std::vector<double> sample(int P) const {
        size_t total = 1;
        for (int t = 0; t < n_; ++t) total *= static_cast<size_t>(P);
        std::vector<double> out(total, 0.0);
        std::vector<std::complex<double>> acc(total);
        for (const auto& [k, a] : terms_) {
            // per-axis phase tables, multiplied out
            std::vector<std::vector<std::complex<double>>> tab(static_cast<size_t>(n_));
            for (int t = 0; t < n_; ++t) {
                tab[static_cast<size_t>(t)].resize(static_cast<size_t>(P));
                for (int i = 0; i < P; ++i) {
                    long long m = (static_cast<long long>(k.freq[static_cast<size_t>(t)]) * i) % P;
                    if (m < 0) m += P;
                    double th = 2.0 * M_PI * static_cast<double>(m) / P;
                    tab[static_cast<size_t>(t)][static_cast<size_t>(i)] = {std::cos(th), std::sin(th)};
                }
            }
            double amp = a.get_d();
            std::vector<int> idx(static_cast<size_t>(n_), 0);
            for (size_t p = 0; p < total; ++p) {
                std::complex<double> z = 1.0;
                for (int t = 0; t < n_; ++t) z *= tab[static_cast<size_t>(t)][static_cast<size_t>(idx[static_cast<size_t>(t)])];
                out[p] += amp * (k.phase == Phase::cos ? z.real() : z.imag());
                for (int t = n_ - 1; t >= 0; --t) {
                    if (++idx[static_cast<size_t>(t)] < P) break;
                    idx[static_cast<size_t>(t)] = 0;
                }
            }
        }
        return out;
    }

    /// Composition with x -> A x for an integer matrix A (row major n x n):
    /// cos(w . A x) = cos((A^T w) . x).
    TrigPoly compose_integer_linear(const std::vector<int>& A) const {
        if (static_cast<int>(A.size()) != n_ * n_) throw std::invalid_argument("TrigPoly: matrix size mismatch");
        TrigPoly r(n_);
        std::vector<int> w2(static_cast<size_t>(n_));
        for (const auto& [k, a] : terms_) {
            for (int j = 0; j < n_; ++j) {
                int s = 0;
                for (int i = 0; i < n_; ++i) s += k.freq[static_cast<size_t>(i)] * A[static_cast<size_t>(i * n_ + j)];
                w2[static_cast<size_t>(j)] = s;
            }
            r.add_term(w2, k.phase, a);
        }
        return r;
    }

private:
    void check(const TrigPoly& o) const {
        if (o.n_ != n_) throw std::invalid_argument("TrigPoly: variable count mismatch");
    }

    int n_ = 0;
    Terms terms_;
};

/// Random polynomial with `terms` modes, |w_t| <= band, amplitudes p/q with
/// |p| <= 9, 1 <= q <= 4.
template <class Rng>
TrigPoly random_trigpoly(int n, Rng& rng, int terms, int band) {
    std::uniform_int_distribution<int> f(-band, band), num(-9, 9), den(1, 4), ph(0, 1);
    TrigPoly p(n);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> w(static_cast<size_t>(n));
        for (int& v : w) v = f(rng);
        int a = num(rng);
        if (a == 0) a = 1;
        mpq_class amp(a, den(rng));
        amp.canonicalize();
        p.add_term(std::move(w), ph(rng) ? Phase::sin : Phase::cos, amp);
    }
    return p;
}

}  // namespace hodc
