#pragma once

// Hybrid differential forms: q-forms on R^N whose coefficients are functions
// of the first n variables. Components are stored by lexicographic label rank.

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "bump_series.hpp"
#include "grid_field.hpp"
#include "multiindex.hpp"
#include "trigpoly.hpp"

namespace hodc {

template <class C>
struct coeff_traits;

template <>
struct coeff_traits<TrigPoly> {
    using scalar = mpq_class;
    static constexpr bool exact = true;
    static constexpr const char* name = "trig";
};
template <>
struct coeff_traits<GridField> {
    using scalar = double;
    static constexpr bool exact = false;
    static constexpr const char* name = "grid";
};
template <>
struct coeff_traits<BumpSeries> {
    using scalar = double;
    static constexpr bool exact = false;
    static constexpr const char* name = "bump";
};

template <class C>
using scalar_t = typename coeff_traits<C>::scalar;

/// Default batched derivative; GridField has a faster overload.
template <class C>
std::vector<C> derivatives(const C& f, const std::vector<std::vector<int>>& alphas) {
    std::vector<C> out;
    out.reserve(alphas.size());
    for (const auto& a : alphas) out.push_back(f.derivative(a));
    return out;
}

template <class C>
class Form {
public:
    Form() = default;
    // degrees above N give the (componentless) zero form
    Form(int n, int N, int q, const C& zero) : n_(n), N_(N), q_(q), proto_(zero.zero_like()) {
        if (n < 1 || N < n) throw std::invalid_argument("Form: need 1 <= n <= N");
        if (q < 0) throw std::invalid_argument("Form: negative degree");
        if (zero.nvars() != n) throw std::invalid_argument("Form: coefficients must have n variables");
        comps_.assign(small_binom(N, q), proto_);
    }

    int n() const { return n_; }
    int N() const { return N_; }
    int q() const { return q_; }
    size_t size() const { return comps_.size(); }
    const std::vector<Label>& labels() const { return labels_of(N_, q_); }
    const Label& label(size_t r) const { return labels()[r]; }

    C& operator[](size_t r) { return comps_[r]; }
    const C& operator[](size_t r) const { return comps_[r]; }
    C& at(const Label& I) { return comps_[rank_checked(I)]; }
    const C& at(const Label& I) const { return comps_[rank_checked(I)]; }
    std::vector<C>& components() { return comps_; }
    const std::vector<C>& components() const { return comps_; }

    C zero_coeff() const { return proto_; }
    Form zero_like() const { return Form(n_, N_, q_, zero_coeff()); }
    Form zero_of_degree(int q) const { return Form(n_, N_, q, zero_coeff()); }

    bool is_zero() const {
        for (const auto& c : comps_)
            if (!c.is_zero()) return false;
        return true;
    }

    Form& operator+=(const Form& o) {
        check(o);
        for (size_t r = 0; r < comps_.size(); ++r) comps_[r] += o.comps_[r];
        return *this;
    }
    Form& operator-=(const Form& o) {
        check(o);
        for (size_t r = 0; r < comps_.size(); ++r) comps_[r] -= o.comps_[r];
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    Form& operator*=(const scalar_t<C>& s) {
        for (auto& c : comps_) c *= s;
        return *this;
    }
    Form operator-() const {
        Form r = *this;
        for (auto& c : r.comps_) c = -c;
        return r;
    }
    bool operator==(const Form& o) const {
        return n_ == o.n_ && N_ == o.N_ && q_ == o.q_ && comps_ == o.comps_;
    }

    bool same_shape(const Form& o) const { return n_ == o.n_ && N_ == o.N_ && q_ == o.q_; }

private:
    size_t rank_checked(const Label& I) const {
        if (I.size() != q_ || I.max_index() > N_) throw std::invalid_argument("Form: label " + I.str() + " out of range");
        return label_rank(I, N_);
    }
    void check(const Form& o) const {
        if (!same_shape(o)) throw std::invalid_argument("Form: shape mismatch");
    }

    int n_ = 0, N_ = 0, q_ = 0;
    C proto_;
    std::vector<C> comps_;
};

/// Source part of an embedded multi-index, or empty when it reaches past slot n.
inline std::vector<int> source_part(const MultiIndex& alpha, int n) {
    if (!alpha.supported_in(n)) return {};
    return std::vector<int>(alpha.exps.begin(), alpha.exps.begin() + std::min(n, alpha.dim()));
}

template <class C>
Form<C> partial(const Form<C>& F, const MultiIndex& alpha) {
    if (alpha.dim() != F.N() && alpha.dim() != F.n())
        throw std::invalid_argument("partial: multi-index must have length n or N");
    Form<C> out = F.zero_like();
    auto a = source_part(alpha, F.n());
    if (a.empty()) return out;  // hybrid coefficients are constant in z_{n+1..N}
    a.resize(static_cast<size_t>(F.n()), 0);
    for (size_t r = 0; r < F.size(); ++r) out[r] = F[r].derivative(a);
    return out;
}

/// (*F)_{I'} = eps^{I I'} F_I.
template <class C>
Form<C> hodge_star(const Form<C>& F) {
    Form<C> out = F.zero_of_degree(F.N() - F.q());
    for (size_t r = 0; r < F.size(); ++r) {
        auto [Ic, s] = complement(F.label(r), F.N());
        C c = F[r];
        if (s < 0) c = -c;
        out.at(Ic) = std::move(c);
    }
    return out;
}

template <class C>
Form<C> wedge(const Form<C>& F, const Form<C>& G) {
    if (F.n() != G.n() || F.N() != G.N()) throw std::invalid_argument("wedge: ambient dimension mismatch");
    if (F.q() + G.q() > F.N()) throw std::invalid_argument("wedge: total degree exceeds N");
    Form<C> out = F.zero_of_degree(F.q() + G.q());
    for (size_t a = 0; a < F.size(); ++a) {
        if (F[a].is_zero()) continue;
        const auto ma = F.label(a).mask();
        for (size_t b = 0; b < G.size(); ++b) {
            const auto mb = G.label(b).mask();
            int s = merge_sign(ma, mb);
            if (s == 0 || G[b].is_zero()) continue;
            C prod = F[a] * G[b];
            auto& dst = out.at(label_from_mask(ma | mb));
            if (s > 0) dst += prod;
            else dst -= prod;
        }
    }
    return out;
}

// ---- sampling helpers ----------------------------------------------------

inline std::vector<double> sample_coeff(const TrigPoly& c, int P) { return c.sample(P); }
inline std::vector<double> sample_coeff(const BumpSeries& c, int P) { return c.sample(P); }
inline std::vector<double> sample_coeff(const GridField& c, int P) {
    if (P != 0 && P != c.resolution()) throw std::invalid_argument("GridField sampled at a different resolution");
    return c.samples();
}

template <class C>
int resolve_resolution(const Form<C>& F, int P) {
    if constexpr (std::is_same_v<C, GridField>) {
        const int R = F.zero_coeff().resolution();
        if (P != 0 && P != R) throw std::invalid_argument("resolution mismatch");
        return R;
    } else {
        if (P <= 0) throw std::invalid_argument("a grid resolution P is required for this backend");
        return P;
    }
}

inline size_t grid_points(int n, int P) {
    size_t t = 1;
    for (int i = 0; i < n; ++i) t *= static_cast<size_t>(P);
    return t;
}

/// Exact coordinate pairing sum_I (2pi)^-n int F_I G_I.
template <class C>
scalar_t<C> inner_product(const Form<C>& F, const Form<C>& G) {
    if (!F.same_shape(G)) throw std::invalid_argument("inner_product: degree or dimension mismatch");
    scalar_t<C> s = 0;
    for (size_t r = 0; r < F.size(); ++r) s += integral_product(F[r], G[r]);
    return s;
}

/// Pairing by quadrature at resolution P (any backend).
template <class C>
double inner_product_sampled(const Form<C>& F, const Form<C>& G, int P = 0) {
    if (!F.same_shape(G)) throw std::invalid_argument("inner_product: degree or dimension mismatch");
    P = resolve_resolution(F, P);
    double s = 0;
    for (size_t r = 0; r < F.size(); ++r) {
        if (F[r].is_zero() || G[r].is_zero()) continue;
        auto a = sample_coeff(F[r], P);
        auto b = sample_coeff(G[r], P);
        double acc = 0;
        for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
        s += acc / static_cast<double>(a.size());
    }
    return s;
}

/// int *_n i^* *_N (F ^ *_N G).
template <class C>
scalar_t<C> inner_product_wedge(const Form<C>& F, const Form<C>& G) {
    if (!F.same_shape(G)) throw std::invalid_argument("inner_product_wedge: degree or dimension mismatch");
    Form<C> top = wedge(F, hodge_star(G));
    Form<C> fn = hodge_star(top);  // a function on R^N
    // i^* keeps the function; *_n turns it into f dx^{1..n}; integrate
    return fn[0].mean();
}

// ---- norms ------------------------------------------------------------------

namespace detail {
inline double power_mean(const std::vector<double>& acc_sq, double p) {
    double s = 0;
    if (p == 2.0)
        for (double v : acc_sq) s += v;
    else
        for (double v : acc_sq) s += std::pow(v, 0.5 * p);
    return std::pow(s / static_cast<double>(acc_sq.size()), 1.0 / p);
}
inline void accumulate_sq(std::vector<double>& acc, const std::vector<double>& v) {
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += v[i] * v[i];
}
inline void check_p(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("norm exponent p must be >= 1");
}
}  // namespace detail

/// (int (sum_I |F_I|^2)^{p/2})^{1/p}, normalized measure.
template <class C>
double lp_norm(const Form<C>& F, double p, int P = 0) {
    detail::check_p(p);
    P = resolve_resolution(F, P);
    std::vector<double> acc(grid_points(F.n(), P), 0.0);
    for (size_t r = 0; r < F.size(); ++r)
        if (!F[r].is_zero()) detail::accumulate_sq(acc, sample_coeff(F[r], P));
    return detail::power_mean(acc, p);
}

template <class C>
std::vector<std::vector<int>> first_order_alphas(const Form<C>& F) {
    std::vector<std::vector<int>> al;
    for (int j = 0; j < F.n(); ++j) {
        std::vector<int> a(static_cast<size_t>(F.n()), 0);
        a[static_cast<size_t>(j)] = 1;
        al.push_back(a);
    }
    return al;
}

/// L^p norm of the array (d_j F_I), aggregated pointwise in l2.
template <class C>
double grad_lp_norm(const Form<C>& F, double p, int P = 0) {
    detail::check_p(p);
    P = resolve_resolution(F, P);
    std::vector<double> acc(grid_points(F.n(), P), 0.0);
    const auto al = first_order_alphas(F);
    for (size_t r = 0; r < F.size(); ++r) {
        if (F[r].is_zero()) continue;
        for (const auto& d : derivatives(F[r], al)) detail::accumulate_sq(acc, sample_coeff(d, P));
    }
    return detail::power_mean(acc, p);
}

/// (sum_{I, beta in S(n,s), s<=a} ||d^beta F_I||_p^p)^{1/p}; with
/// `homogeneous` only s = a contributes.
template <class C>
double sobolev_norm(const Form<C>& F, int a, double p, int P = 0, bool homogeneous = false) {
    detail::check_p(p);
    if (a < 0) throw std::invalid_argument("sobolev_norm: order must be >= 0");
    P = resolve_resolution(F, P);
    std::vector<std::vector<int>> al;
    for (int s = homogeneous ? a : 0; s <= a; ++s)
        for (const auto& b : enum_multiindices(F.n(), s)) al.push_back(b.exps);
    double total = 0;
    for (size_t r = 0; r < F.size(); ++r) {
        if (F[r].is_zero()) continue;
        for (const auto& d : derivatives(F[r], al)) {
            auto v = sample_coeff(d, P);
            double s = 0;
            if (p == 2.0)
                for (double x : v) s += x * x;
            else
                for (double x : v) s += std::pow(std::abs(x), p);
            total += s / static_cast<double>(v.size());
        }
    }
    return std::pow(total, 1.0 / p);
}

// ---- linear pullbacks -----------------------------------------------------

/// Determinant of a small dense matrix (Gaussian elimination with pivoting).
inline double det_small(std::vector<double> m, int d) {
    double det = 1;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(m[static_cast<size_t>(r * d + c)]) > std::abs(m[static_cast<size_t>(piv * d + c)])) piv = r;
        if (m[static_cast<size_t>(piv * d + c)] == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < d; ++k) std::swap(m[static_cast<size_t>(c * d + k)], m[static_cast<size_t>(piv * d + k)]);
            det = -det;
        }
        double p = m[static_cast<size_t>(c * d + c)];
        det *= p;
        for (int r = c + 1; r < d; ++r) {
            double f = m[static_cast<size_t>(r * d + c)] / p;
            for (int k = c; k < d; ++k) m[static_cast<size_t>(r * d + k)] -= f * m[static_cast<size_t>(c * d + k)];
        }
    }
    return det;
}

/// Integer determinant by cofactor expansion over the (small) minor.
inline long long det_small_int(const std::vector<long long>& m, int d) {
    if (d == 0) return 1;
    if (d == 1) return m[0];
    long long s = 0;
    for (int c = 0; c < d; ++c) {
        long long a = m[static_cast<size_t>(c)];
        if (a == 0) continue;
        std::vector<long long> sub;
        sub.reserve(static_cast<size_t>((d - 1) * (d - 1)));
        for (int r = 1; r < d; ++r)
            for (int k = 0; k < d; ++k)
                if (k != c) sub.push_back(m[static_cast<size_t>(r * d + k)]);
        s += ((c & 1) ? -a : a) * det_small_int(sub, d - 1);
    }
    return s;
}

/// Psi = A (+) I_{N-n}, as a row-major N x N matrix.
template <class T>
std::vector<T> hybrid_extension(const std::vector<T>& A, int n, int N) {
    std::vector<T> psi(static_cast<size_t>(N * N), T(0));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i < n && j < n) psi[static_cast<size_t>(i * N + j)] = A[static_cast<size_t>(i * n + j)];
            else if (i == j) psi[static_cast<size_t>(i * N + j)] = T(1);
        }
    return psi;
}

template <class T>
std::vector<T> minor_of(const std::vector<T>& M, int N, const Label& rows, const Label& cols) {
    std::vector<T> out;
    out.reserve(static_cast<size_t>(rows.size() * cols.size()));
    for (int r : rows.idx)
        for (int c : cols.idx) out.push_back(M[static_cast<size_t>((r - 1) * N + (c - 1))]);
    return out;
}

/// Exact pullback by x -> A x for an integer matrix A (typically a signed permutation).
inline Form<TrigPoly> pullback_linear(const Form<TrigPoly>& F, const std::vector<int>& A) {
    const int n = F.n(), N = F.N(), q = F.q();
    if (static_cast<int>(A.size()) != n * n) throw std::invalid_argument("pullback_linear: A must be n x n");
    std::vector<long long> Al(A.begin(), A.end());
    if (det_small_int(Al, n) == 0) throw std::invalid_argument("pullback_linear: singular matrix");
    auto psi = hybrid_extension(Al, n, N);
    Form<TrigPoly> out = F.zero_like();
    std::vector<TrigPoly> composed;
    for (size_t r = 0; r < F.size(); ++r) composed.push_back(F[r].compose_integer_linear(A));
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = 0; j < F.size(); ++j) {
            if (composed[j].is_zero()) continue;
            long long d = det_small_int(minor_of(psi, N, F.label(j), out.label(i)), q);
            if (d != 0) out[i].add_scaled(composed[j], mpq_class(static_cast<long>(d)));
        }
    return out;
}

/// Pullback by x -> c + A (x - c), c the cell center, through the spectral
/// interpolant; values whose preimage leaves the cell are set to zero.
inline Form<GridField> pullback_linear(const Form<GridField>& F, const std::vector<double>& A) {
    const int n = F.n(), N = F.N(), q = F.q();
    if (static_cast<int>(A.size()) != n * n) throw std::invalid_argument("pullback_linear: A must be n x n");
    if (std::abs(det_small(A, n)) < 1e-14) throw std::invalid_argument("pullback_linear: singular matrix");
    const GridField proto = F.zero_coeff();
    std::vector<std::vector<double>> pts;
    std::vector<char> inside;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    for (size_t p = 0; p < proto.size(); ++p) {
        std::vector<double> y(static_cast<size_t>(n));
        bool in = true;
        for (int i = 0; i < n; ++i) {
            double s = M_PI;
            for (int j = 0; j < n; ++j) s += A[static_cast<size_t>(i * n + j)] * (proto.coord(idx[static_cast<size_t>(j)]) - M_PI);
            y[static_cast<size_t>(i)] = s;
            in = in && s >= 0.0 && s < 2.0 * M_PI;
        }
        pts.push_back(std::move(y));
        inside.push_back(in ? 1 : 0);
        proto.advance(idx);
    }
    std::vector<GridField> composed;
    for (size_t r = 0; r < F.size(); ++r) {
        GridField g = proto;
        if (!F[r].is_zero()) {
            auto v = F[r].interpolate(F[r].spectrum(), pts);
            for (size_t p = 0; p < v.size(); ++p) g[p] = inside[p] ? v[p] : 0.0;
        }
        composed.push_back(std::move(g));
    }
    auto psi = hybrid_extension(A, n, N);
    Form<GridField> out = F.zero_like();
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = 0; j < F.size(); ++j) {
            if (composed[j].is_zero()) continue;
            double d = q == 0 ? 1.0 : det_small(minor_of(psi, N, F.label(j), out.label(i)), q);
            if (d != 0.0) out[i].add_scaled(composed[j], d);
        }
    return out;
}

/// Sample an exact or bump form onto the grid.
template <class C>
Form<GridField> to_grid(const Form<C>& F, int P) {
    Form<GridField> out(F.n(), F.N(), F.q(), GridField(F.n(), P));
    for (size_t r = 0; r < F.size(); ++r)
        if (!F[r].is_zero()) out[r] = GridField(F.n(), P, sample_coeff(F[r], P));
    return out;
}

}  // namespace hodc
