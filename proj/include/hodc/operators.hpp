#pragma once

// The operators T~_{l,aleph} on hybrid forms over R^N, the source-space
// operators T = i^* T~ pi^*, their adjoints and Hodge Laplacians.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "form.hpp"
#include "increments.hpp"
#include "multiindex.hpp"

namespace hodc {

/// One term of (T~F)_out += sign * d^alpha F_in; ranks are lexicographic.
struct Coupling {
    std::uint32_t in = 0, alpha = 0, out = 0;
    int sign = 0;
};

class OperatorSpec {
public:
    explicit OperatorSpec(Ordering ord, bool sign_fault = false)
        : ord_(std::make_shared<const Ordering>(std::move(ord))), fault_(sign_fault), cache_(std::make_shared<Cache>()) {
        const int n = ord_->n(), k = ord_->k(), ell = ord_->ell(), N = ord_->N();
        if (n < 1 || k < 1 || ell < 1) throw std::invalid_argument("OperatorSpec: need n, k, l >= 1");
        if (binom(static_cast<unsigned long>(N), static_cast<unsigned long>(ell)) !=
            binom(static_cast<unsigned long>(n - 1 + k), static_cast<unsigned long>(k)))
            throw std::invalid_argument("OperatorSpec: C(N,l) != C(n-1+k,k)");
        if (N < n - 1 + ell) throw std::invalid_argument("OperatorSpec: N < n-1+l");
        if (N > 62) throw std::invalid_argument("OperatorSpec: N too large");
        for (const auto& a : ord_->multiindices()) alphas_.push_back(a.exps);
    }

    int n() const { return ord_->n(); }
    int k() const { return ord_->k(); }
    int ell() const { return ord_->ell(); }
    int N() const { return ord_->N(); }
    const Ordering& ordering() const { return *ord_; }
    bool sign_fault() const { return fault_; }
    /// Source exponent vectors, indexed like ordering().multiindices().
    const std::vector<std::vector<int>>& alphas() const { return alphas_; }
    std::uint64_t label_mask(size_t alpha) const { return ord_->label_of(alpha).mask(); }

    std::string describe() const {
        return "n=" + std::to_string(n()) + " k=" + std::to_string(k()) + " l=" + std::to_string(ell()) +
               " N=" + std::to_string(N()) + " ordering=" + to_string(ord_->kind()) + "#" + ord_->hash();
    }

    /// T~ from degree q to q+l (empty when q+l > N).
    const std::vector<Coupling>& couplings(int q) const { return table(q, false); }
    /// T = i^* T~ pi^* from degree q to q+l, ranks over n.
    const std::vector<Coupling>& source_couplings(int q) const { return table(q, true); }

private:
    struct Cache {
        std::mutex mu;
        std::map<std::pair<int, bool>, std::shared_ptr<const std::vector<Coupling>>> tables;
    };

    const std::vector<Coupling>& table(int q, bool source) const {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto key = std::make_pair(q, source);
        auto it = cache_->tables.find(key);
        if (it != cache_->tables.end()) return *it->second;
        auto t = std::make_shared<std::vector<Coupling>>(build(q, source));
        cache_->tables.emplace(key, t);
        return *t;
    }

    std::vector<Coupling> build(int q, bool source) const {
        const int dim = source ? n() : N();
        std::vector<Coupling> out;
        if (q < 0 || q + ell() > dim) return out;
        const std::uint64_t allowed = (std::uint64_t{1} << dim) - 1;
        const auto& labs = labels_of(dim, q);
        for (size_t i = 0; i < labs.size(); ++i) {
            const auto mi = labs[i].mask();
            for (size_t a = 0; a < alphas_.size(); ++a) {
                const auto ma = label_mask(a);
                if ((ma & ~allowed) != 0) continue;
                int s = merge_sign(ma, mi);
                if (s == 0) continue;
                out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(a),
                               static_cast<std::uint32_t>(label_rank(label_from_mask(ma | mi), dim)), s});
            }
        }
        if (fault_ && !out.empty()) out.front().sign = -out.front().sign;
        return out;
    }

    std::shared_ptr<const Ordering> ord_;
    bool fault_ = false;
    std::vector<std::vector<int>> alphas_;
    std::shared_ptr<Cache> cache_;
};

inline OperatorSpec make_spec(int n, int k, int ell, int N, OrderingKind kind) {
    return OperatorSpec(make_ordering(n, k, ell, N, kind));
}

namespace detail {

template <class C>
void add_signed(C& dst, const C& src, int s) {
    if (s > 0) dst += src;
    else if (s < 0) dst -= src;
}

/// sum over couplings of sign * d^alpha F_in into out-degree form (transpose: in/out swapped).
template <class C>
Form<C> apply_table(const OperatorSpec& s, const std::vector<Coupling>& tab, const Form<C>& F, int out_degree,
                    bool transpose, int global_sign) {
    Form<C> out = F.zero_of_degree(out_degree);
    if (out.size() == 0) return out;
    std::map<std::uint32_t, std::vector<const Coupling*>> by_src;
    for (const auto& c : tab) by_src[transpose ? c.out : c.in].push_back(&c);
    for (const auto& [src, list] : by_src) {
        if (F[src].is_zero()) continue;
        std::vector<std::vector<int>> al;
        for (const auto* c : list) al.push_back(s.alphas()[c->alpha]);
        auto ds = derivatives(F[src], al);
        for (size_t j = 0; j < list.size(); ++j)
            add_signed(out[transpose ? list[j]->in : list[j]->out], ds[j], list[j]->sign * global_sign);
    }
    return out;
}

template <class C>
void check_hybrid(const OperatorSpec& s, const Form<C>& F, const char* what) {
    if (F.n() != s.n() || F.N() != s.N()) throw std::invalid_argument(std::string(what) + ": form dimensions do not match the spec");
}
template <class C>
void check_source(const OperatorSpec& s, const Form<C>& f, const char* what) {
    if (f.n() != s.n() || f.N() != s.n()) throw std::invalid_argument(std::string(what) + ": expected a form over R^n");
}

inline int parity_sign(long e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// T~F; degree overflow gives the componentless zero form.
template <class C>
Form<C> apply_T_unchecked(const OperatorSpec& s, const Form<C>& F) {
    return detail::apply_table(s, s.couplings(F.q()), F, F.q() + s.ell(), false, 1);
}

template <class C>
Form<C> apply_T(const OperatorSpec& s, const Form<C>& F) {
    detail::check_hybrid(s, F, "apply_T");
    if (F.q() + s.ell() > s.N()) throw std::invalid_argument("apply_T: q + l > N");
    return apply_T_unchecked(s, F);
}

/// Adjoint through the coordinate formula: (-1)^k times the transposed couplings.
template <class C>
Form<C> apply_T_star_coordinate(const OperatorSpec& s, const Form<C>& G) {
    detail::check_hybrid(s, G, "apply_T_star");
    if (G.q() < s.ell()) throw std::invalid_argument("apply_T_star: q < l");
    const int q = G.q() - s.ell();
    return detail::apply_table(s, s.couplings(q), G, q, true, detail::parity_sign(s.k()));
}

/// The coordinate formula with the global factor (-1)^{k+Nl} taken literally.
template <class C>
Form<C> apply_T_star_coordinate_literal(const OperatorSpec& s, const Form<C>& G) {
    Form<C> r = apply_T_star_coordinate(s, G);
    if (detail::parity_sign(static_cast<long>(s.N()) * s.ell()) < 0) r = -r;
    return r;
}

/// T~* = (-1)^{k + q(N-l-q)} *T~*, q the output degree.
template <class C>
Form<C> apply_T_star(const OperatorSpec& s, const Form<C>& G) {
    detail::check_hybrid(s, G, "apply_T_star");
    if (G.q() < s.ell()) throw std::invalid_argument("apply_T_star: q < l");
    const long q = G.q() - s.ell();
    Form<C> r = hodge_star(apply_T_unchecked(s, hodge_star(G)));
    if (detail::parity_sign(s.k() + q * (s.N() - s.ell() - q)) < 0) r = -r;
    return r;
}

// ---- source space -----------------------------------------------------------

/// Trivial extension of a form on R^n to a hybrid form on R^N.
template <class C>
Form<C> pi_star(const Form<C>& f, int N) {
    Form<C> out(f.n(), N, f.q(), f.zero_coeff());
    for (size_t r = 0; r < f.size(); ++r) out.at(f.label(r)) = f[r];
    return out;
}

/// Restriction to R^n: keeps the labels inside {1..n}.
template <class C>
Form<C> i_star(const Form<C>& F) {
    Form<C> out(F.n(), F.n(), F.q(), F.zero_coeff());
    for (size_t r = 0; r < out.size(); ++r) out[r] = F.at(out.label(r));
    return out;
}

template <class C>
Form<C> apply_Top(const OperatorSpec& s, const Form<C>& f) {
    detail::check_source(s, f, "apply_Top");
    if (s.n() < s.ell()) throw std::invalid_argument("apply_Top: n < l");
    if (f.q() + s.ell() > s.N()) return f.zero_of_degree(f.q() + s.ell());
    return i_star(apply_T_unchecked(s, pi_star(f, s.N())));
}

/// T* = (-1)^{k + q(n-l-q)} *_n T *_n, q the output degree.
template <class C>
Form<C> apply_Top_star(const OperatorSpec& s, const Form<C>& g) {
    detail::check_source(s, g, "apply_Top_star");
    if (s.n() < s.ell()) throw std::invalid_argument("apply_Top_star: n < l");
    if (g.q() < s.ell()) throw std::invalid_argument("apply_Top_star: q < l");
    const long q = g.q() - s.ell();
    Form<C> r = hodge_star(apply_Top(s, hodge_star(g)));
    if (detail::parity_sign(s.k() + q * (s.n() - s.ell() - q)) < 0) r = -r;
    return r;
}

/// i^* T~* pi^*, the second route to the source adjoint.
template <class C>
Form<C> apply_Top_star_restricted(const OperatorSpec& s, const Form<C>& g) {
    detail::check_source(s, g, "apply_Top_star");
    return i_star(apply_T_star_coordinate(s, pi_star(g, s.N())));
}

// ---- composition T~ o T~ ------------------------------------------------------

struct ComposeReport {
    int q = 0;
    bool applicable = false;          // q + 2l <= N
    long max_abs_coeff = 0;           // of T~ o T~ as an operator
    long max_abs_single = 0;          // of the single-orientation sum
    bool factor_holds = false;        // full == (1 + (-1)^{l^2}) * single
    size_t nonzero_entries = 0;
};

/// Exact coefficients of T~ o T~ at degree q, keyed by (L, I, alpha+beta).
inline ComposeReport compose_TT(const OperatorSpec& s, int q) {
    ComposeReport rep;
    rep.q = q;
    if (q < 0 || q + 2 * s.ell() > s.N()) return rep;
    rep.applicable = true;
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::vector<int>>;
    std::map<Key, long> full, single;
    const auto& t1 = s.couplings(q);
    const auto& t2 = s.couplings(q + s.ell());
    std::map<std::uint32_t, std::vector<const Coupling*>> second;
    for (const auto& c : t2) second[c.in].push_back(&c);
    for (const auto& c1 : t1) {
        auto it = second.find(c1.out);
        if (it == second.end()) continue;
        for (const auto* c2 : it->second) {
            std::vector<int> sum = s.alphas()[c1.alpha];
            for (size_t t = 0; t < sum.size(); ++t) sum[t] += s.alphas()[c2->alpha][t];
            Key key{c2->out, c1.in, sum};
            full[key] += c1.sign * c2->sign;
            // beta applied last; single orientation keeps alpha < beta
            if (c1.alpha < c2->alpha) single[key] += c1.sign * c2->sign;
        }
    }
    const long factor = 1 + detail::parity_sign(static_cast<long>(s.ell()) * s.ell());
    rep.factor_holds = true;
    for (const auto& [k, v] : full) {
        rep.max_abs_coeff = std::max(rep.max_abs_coeff, std::labs(v));
        if (v != 0) ++rep.nonzero_entries;
        auto it = single.find(k);
        long sv = it == single.end() ? 0 : it->second;
        if (v != factor * sv) rep.factor_holds = false;
    }
    for (const auto& [k, v] : single) {
        rep.max_abs_single = std::max(rep.max_abs_single, std::labs(v));
        if (!full.count(k) && v != 0 && factor != 0) rep.factor_holds = false;
    }
    return rep;
}

// ---- Hodge Laplacian ----------------------------------------------------------

/// T~T~* + T~*T~ on degree-q forms; out-of-range halves drop out.
template <class C>
Form<C> box_apply(const OperatorSpec& s, const Form<C>& H) {
    detail::check_hybrid(s, H, "box_apply");
    Form<C> out = H.zero_like();
    const int q = H.q();
    if (q >= s.ell()) out += apply_T_unchecked(s, apply_T_star_coordinate(s, H));
    if (q + s.ell() <= s.N()) out += apply_T_star_coordinate(s, apply_T_unchecked(s, H));
    return out;
}

template <class C>
Form<C> box_apply_source(const OperatorSpec& s, const Form<C>& h) {
    detail::check_source(s, h, "box_apply_source");
    Form<C> out = h.zero_like();
    const int q = h.q();
    if (q >= s.ell()) out += apply_Top(s, apply_Top_star(s, h));
    if (q + s.ell() <= s.n()) out += apply_Top_star(s, apply_Top(s, h));
    return out;
}

/// C~^{MI}_{aleph(i alpha) aleph(i beta)}, sparse; key (M, I, alpha, beta) ranks.
struct CoeffTensor {
    int q = 0;
    int N = 0;
    std::map<std::array<std::uint32_t, 4>, int> entries;

    int at(std::uint32_t M, std::uint32_t I, std::uint32_t a, std::uint32_t b) const {
        auto it = entries.find({M, I, a, b});
        return it == entries.end() ? 0 : it->second;
    }
    bool operator==(const CoeffTensor& o) const { return q == o.q && N == o.N && entries == o.entries; }
};

inline void add_entry(CoeffTensor& t, std::array<std::uint32_t, 4> key, int v) {
    if (v == 0) return;
    auto [it, fresh] = t.entries.emplace(key, v);
    if (!fresh) {
        it->second += v;
        if (it->second == 0) t.entries.erase(it);
    }
}

/// sum_L eps^{aI}_L eps^{bM}_L + sum_K eps^{aK}_M eps^{bK}_I, a = aleph(i alpha), b = aleph(i beta).
inline CoeffTensor box_coeff_tensor(const OperatorSpec& s, int q) {
    CoeffTensor t;
    t.q = q;
    t.N = s.N();
    if (q < 0 || q > s.N()) throw std::invalid_argument("box_coeff_tensor: degree out of range");
    const size_t m = s.alphas().size();
    // T~*T~ half: through L = a u I
    for (const auto& c : s.couplings(q)) {
        const auto mL = labels_of(s.N(), q + s.ell())[c.out].mask();
        for (size_t b = 0; b < m; ++b) {
            const auto mb = s.label_mask(b);
            if ((mb & ~mL) != 0) continue;
            const auto mM = mL & ~mb;
            add_entry(t, {static_cast<std::uint32_t>(label_rank(label_from_mask(mM), s.N())), c.in, c.alpha,
                          static_cast<std::uint32_t>(b)},
                      c.sign * merge_sign(mb, mM));
        }
    }
    // T~T~* half: through K = M \ a
    if (q >= s.ell())
        for (const auto& c : s.couplings(q - s.ell())) {
            // c: K -> M = a u K with sign eps^{aK}_M
            const auto mK = labels_of(s.N(), q - s.ell())[c.in].mask();
            for (size_t b = 0; b < m; ++b) {
                const auto mb = s.label_mask(b);
                int sb = merge_sign(mb, mK);
                if (sb == 0) continue;
                add_entry(t, {c.out, static_cast<std::uint32_t>(label_rank(label_from_mask(mb | mK), s.N())), c.alpha,
                              static_cast<std::uint32_t>(b)},
                          c.sign * sb);
            }
        }
    return t;
}

namespace detail {
inline int eps2_mask(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    if ((a & b) || (c & d) || (a | b) != (c | d)) return 0;
    return merge_sign(a, b) * merge_sign(c, d);
}
}  // namespace detail

/// One entry of the lambda_0 decomposition, lambda_0 = a n b.
inline int box_coeff_closed_entry(int ell, std::uint64_t a, std::uint64_t b, std::uint64_t M, std::uint64_t I) {
    const std::uint64_t l0 = a & b, ah = a & ~l0, bh = b & ~l0;
    const int s = __builtin_popcountll(l0);
    const int pre = merge_sign(l0, ah) * merge_sign(l0, bh);
    int t = 0;
    if ((l0 & (I | M)) == 0) t += detail::eps2_mask(ah, I, bh, M);
    if ((l0 & ~I) == 0 && (l0 & ~M) == 0) {
        const std::uint64_t Is = I & ~l0, Ms = M & ~l0;
        t += detail::parity_sign(static_cast<long>(ell - s) * (ell - s)) * merge_sign(l0, Ms) * merge_sign(l0, Is) *
             detail::eps2_mask(ah, Is, bh, Ms);
    }
    return pre * t;
}

/// The single-term closing formula (1 + (-1)^{(l-|l0|)^2}) eps eps eps, taken literally.
inline int box_coeff_literal_entry(int ell, std::uint64_t a, std::uint64_t b, std::uint64_t M, std::uint64_t I) {
    const std::uint64_t l0 = a & b, ah = a & ~l0, bh = b & ~l0;
    const int s = __builtin_popcountll(l0);
    return (1 + detail::parity_sign(static_cast<long>(ell - s) * (ell - s))) * merge_sign(l0, ah) * merge_sign(l0, bh) *
           detail::eps2_mask(ah, I, bh, M);
}

template <class Entry>
CoeffTensor box_coeff_by_formula(const OperatorSpec& s, int q, Entry&& entry) {
    CoeffTensor t;
    t.q = q;
    t.N = s.N();
    const auto& labs = labels_of(s.N(), q);
    const size_t m = s.alphas().size();
    for (size_t M = 0; M < labs.size(); ++M)
        for (size_t I = 0; I < labs.size(); ++I)
            for (size_t a = 0; a < m; ++a)
                for (size_t b = 0; b < m; ++b) {
                    int v = entry(s.ell(), s.label_mask(a), s.label_mask(b), labs[M].mask(), labs[I].mask());
                    if (v != 0)
                        t.entries[{static_cast<std::uint32_t>(M), static_cast<std::uint32_t>(I), static_cast<std::uint32_t>(a),
                                   static_cast<std::uint32_t>(b)}] = v;
                }
    return t;
}

inline CoeffTensor box_coeff_closed_form(const OperatorSpec& s, int q) {
    if (q < 0 || q > s.N()) throw std::invalid_argument("box_coeff_closed_form: degree out of range");
    return box_coeff_by_formula(s, q, box_coeff_closed_entry);
}

inline CoeffTensor box_coeff_literal(const OperatorSpec& s, int q) {
    return box_coeff_by_formula(s, q, box_coeff_literal_entry);
}

/// delta_{MI} delta_{alpha beta}: every diagonal entry equal to 1 and nothing else.
inline bool is_kronecker(const CoeffTensor& t, size_t alpha_count) {
    for (const auto& [k, v] : t.entries)
        if (!(k[0] == k[1] && k[2] == k[3] && v == 1)) return false;
    return t.entries.size() == small_binom(t.N, t.q) * alpha_count;
}

/// (-1)^k sum C~^{MI} d^{alpha+beta} H_I dz^M.
template <class C>
Form<C> box_contract(const OperatorSpec& s, const CoeffTensor& t, const Form<C>& H) {
    detail::check_hybrid(s, H, "box_contract");
    if (t.q != H.q()) throw std::invalid_argument("box_contract: tensor degree mismatch");
    Form<C> out = H.zero_like();
    const int g = detail::parity_sign(s.k());
    for (const auto& [key, v] : t.entries) {
        const auto& [M, I, a, b] = key;
        if (H[I].is_zero()) continue;
        std::vector<int> ab = s.alphas()[a];
        for (size_t u = 0; u < ab.size(); ++u) ab[u] += s.alphas()[b][u];
        C d = H[I].derivative(ab);
        for (int r = 0; r < std::abs(v); ++r) detail::add_signed(out[M], d, (v > 0 ? 1 : -1) * g);
    }
    return out;
}

// ---- invariance under rotations ------------------------------------------------

inline void require_orthogonal(const std::vector<double>& A, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int r = 0; r < n; ++r) s += A[static_cast<size_t>(r * n + i)] * A[static_cast<size_t>(r * n + j)];
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10) throw std::invalid_argument("invariance_defect: A is not orthogonal");
        }
}

/// || T~ psi^* F - psi^* T~ F ||_2 on the grid.
inline double invariance_defect(const OperatorSpec& s, const std::vector<double>& A, const Form<GridField>& F) {
    detail::check_hybrid(s, F, "invariance_defect");
    require_orthogonal(A, s.n());
    Form<GridField> lhs = apply_T(s, pullback_linear(F, A));
    Form<GridField> rhs = pullback_linear(apply_T(s, F), A);
    return lp_norm(lhs - rhs, 2.0);
}

/// Exact defect for an integer orthogonal (signed permutation) matrix.
inline Form<TrigPoly> invariance_defect_exact(const OperatorSpec& s, const std::vector<int>& A, const Form<TrigPoly>& F) {
    detail::check_hybrid(s, F, "invariance_defect");
    std::vector<double> Ad(A.begin(), A.end());
    require_orthogonal(Ad, s.n());
    return apply_T(s, pullback_linear(F, A)) - pullback_linear(apply_T(s, F), A);
}

}  // namespace hodc
