#pragma once

// Reductions between forms and S(n,k)-indexed families, closed-field
// generators, the l = 1 Hodge solver and the duality / Gagliardo-Nirenberg
// ratio probes.

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "operators.hpp"

namespace hodc {

// ---- reductions ---------------------------------------------------------------

template <class C>
struct Reduction {
    std::vector<C> g, h;
};

/// g_alpha = sum_I eps^{aleph(i alpha) I}_{L0} F_I, likewise h from H; for
/// q = 0 every g_alpha is F itself.
template <class C>
Reduction<C> vs_reduction(const OperatorSpec& s, const Form<C>& F, const Form<C>& H, const Label& L0) {
    detail::check_hybrid(s, F, "vs_reduction");
    detail::check_hybrid(s, H, "vs_reduction");
    if (F.q() != H.q()) throw std::invalid_argument("vs_reduction: F and H must share a degree");
    const int q = F.q();
    if (q > s.N() - s.ell()) throw std::invalid_argument("vs_reduction: q > N - l");
    if (L0.size() != q + s.ell() || L0.max_index() > s.N()) throw std::invalid_argument("vs_reduction: L0 must lie in I(N, q+l)");
    Reduction<C> r;
    const size_t m = s.alphas().size();
    if (q == 0) {
        r.g.assign(m, F[0]);
        r.h.assign(m, H[0]);
        return r;
    }
    r.g.assign(m, F.zero_coeff());
    r.h.assign(m, H.zero_coeff());
    const auto mL = L0.mask();
    for (size_t a = 0; a < m; ++a) {
        const auto ma = s.label_mask(a);
        if ((ma & ~mL) != 0) continue;
        const auto mI = mL & ~ma;
        const int sg = merge_sign(ma, mI);
        const size_t I = label_rank(label_from_mask(mI), s.N());
        detail::add_signed(r.g[a], F[I], sg);
        detail::add_signed(r.h[a], H[I], sg);
    }
    return r;
}

/// sum_alpha d^alpha g_alpha.
template <class C>
C divergence_k(const OperatorSpec& s, const std::vector<C>& g) {
    if (g.size() != s.alphas().size()) throw std::invalid_argument("divergence_k: family has the wrong size");
    C out = g.front().zero_like();
    for (size_t a = 0; a < g.size(); ++a) out += g[a].derivative(s.alphas()[a]);
    return out;
}

/// F_I = eps^{I' I}_{(1..N)} g_alpha with i alpha = aleph^{-1}(I'); degree N - l.
template <class C>
Form<C> vs_lift(const OperatorSpec& s, const std::vector<C>& g) {
    if (g.size() != s.alphas().size()) throw std::invalid_argument("vs_lift: family has the wrong size");
    Form<C> F(s.n(), s.N(), s.N() - s.ell(), g.front().zero_like());
    for (size_t r = 0; r < F.size(); ++r) {
        const Label& I = F.label(r);
        auto [Ic, unused] = complement(I, s.N());
        (void)unused;
        const size_t a = s.ordering().alpha_of(label_rank(Ic, s.N()));
        detail::add_signed(F[r], g[a], merge_sign(Ic.mask(), I.mask()));
    }
    return F;
}

// ---- rational linear algebra ----------------------------------------------------

using QMat = std::vector<std::vector<mpq_class>>;

/// Basis of the right null space (columns returned as vectors).
inline std::vector<std::vector<mpq_class>> nullspace(QMat A, size_t cols) {
    const size_t rows = A.size();
    std::vector<int> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && A[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(A[p], A[r]);
        mpq_class inv = 1 / A[r][c];
        for (size_t j = c; j < cols; ++j) A[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            mpq_class f = A[i][c];
            for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
        }
        pivot_col.push_back(static_cast<int>(c));
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;
    std::vector<std::vector<mpq_class>> basis;
    for (size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<mpq_class> v(cols, 0);
        v[f] = 1;
        for (size_t i = 0; i < pivot_col.size(); ++i) v[static_cast<size_t>(pivot_col[i])] = -A[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline QMat invert(QMat A) {
    const size_t n = A.size();
    QMat I(n, std::vector<mpq_class>(n, 0));
    for (size_t i = 0; i < n; ++i) I[i][i] = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && A[p][c] == 0) ++p;
        if (p == n) throw std::runtime_error("invert: singular matrix");
        std::swap(A[p], A[c]);
        std::swap(I[p], I[c]);
        mpq_class inv = 1 / A[c][c];
        for (size_t j = 0; j < n; ++j) {
            A[c][j] *= inv;
            I[c][j] *= inv;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == c || A[i][c] == 0) continue;
            mpq_class f = A[i][c];
            for (size_t j = 0; j < n; ++j) {
                A[i][j] -= f * A[c][j];
                I[i][j] -= f * I[c][j];
            }
        }
    }
    return I;
}

/// Orthogonal projector onto ker A, exact.
inline QMat kernel_projector(const QMat& A, size_t cols) {
    auto B = nullspace(A, cols);
    QMat Pm(cols, std::vector<mpq_class>(cols, 0));
    if (B.empty()) return Pm;
    const size_t d = B.size();
    QMat G(d, std::vector<mpq_class>(d, 0));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j)
            for (size_t t = 0; t < cols; ++t) G[i][j] += B[i][t] * B[j][t];
    QMat Gi = invert(G);
    for (size_t a = 0; a < cols; ++a)
        for (size_t b = 0; b < cols; ++b) {
            mpq_class s = 0;
            for (size_t i = 0; i < d; ++i)
                for (size_t j = 0; j < d; ++j) s += B[i][a] * Gi[i][j] * B[j][b];
            Pm[a][b] = s;
        }
    return Pm;
}

/// Integer symbol matrix of T~ at degree q for the frequency w: R_{LI} = sum eps w^alpha.
inline QMat symbol_at(const OperatorSpec& s, int q, const std::vector<int>& w) {
    QMat R(small_binom(s.N(), q + s.ell()), std::vector<mpq_class>(small_binom(s.N(), q), 0));
    for (const auto& c : s.couplings(q)) {
        mpz_class v = 1;
        for (size_t t = 0; t < w.size(); ++t)
            for (int e = 0; e < s.alphas()[c.alpha][t]; ++e) v *= w[t];
        R[c.out][c.in] += mpq_class(v * c.sign);
    }
    return R;
}

// ---- closed fields ---------------------------------------------------------------

struct ClosedFieldOptions {
    int terms = 2;  // modes per component
    int band = 2;   // max |w_t|
};

inline Form<TrigPoly> random_trig_form(int n, int N, int q, std::mt19937_64& rng, int terms, int band, bool mean_zero = false) {
    Form<TrigPoly> F(n, N, q, TrigPoly(n));
    for (size_t r = 0; r < F.size(); ++r) {
        TrigPoly p = random_trigpoly(n, rng, terms, band);
        if (mean_zero) p -= TrigPoly::constant(n, p.mean());
        F[r] = std::move(p);
    }
    return F;
}

/// Project every frequency block of F onto ker R(w), exactly.
inline Form<TrigPoly> project_closed(const OperatorSpec& s, const Form<TrigPoly>& F) {
    const int q = F.q();
    if (q + s.ell() > s.N()) return F;
    std::map<std::vector<int>, std::pair<std::vector<mpq_class>, std::vector<mpq_class>>> blocks;
    for (size_t r = 0; r < F.size(); ++r)
        for (const auto& [key, a] : F[r].terms()) {
            auto& blk = blocks[key.freq];
            if (blk.first.empty()) {
                blk.first.assign(F.size(), 0);
                blk.second.assign(F.size(), 0);
            }
            (key.phase == Phase::cos ? blk.first : blk.second)[r] = a;
        }
    Form<TrigPoly> out = F.zero_like();
    for (const auto& [w, blk] : blocks) {
        auto Pm = kernel_projector(symbol_at(s, q, w), F.size());
        for (size_t i = 0; i < F.size(); ++i) {
            mpq_class c = 0, sn = 0;
            for (size_t j = 0; j < F.size(); ++j) {
                c += Pm[i][j] * blk.first[j];
                sn += Pm[i][j] * blk.second[j];
            }
            out[i].add_term(w, Phase::cos, c);
            out[i].add_term(w, Phase::sin, sn);
        }
    }
    return out;
}

/// A random mean-zero form with T~F = 0, exact.
inline Form<TrigPoly> make_closed_field(const OperatorSpec& s, int q, std::uint64_t seed, ClosedFieldOptions opt = {}) {
    if (q < 0 || q > s.N()) throw std::invalid_argument("make_closed_field: degree out of range");
    std::mt19937_64 rng(seed);
    if (q + s.ell() > s.N()) return random_trig_form(s.n(), s.N(), q, rng, opt.terms, opt.band, true);
    if (s.ell() % 2 == 1 && q >= s.ell()) {
        auto Phi = random_trig_form(s.n(), s.N(), q - s.ell(), rng, opt.terms, opt.band, true);
        return apply_T(s, Phi);
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
        auto F = project_closed(s, random_trig_form(s.n(), s.N(), q, rng, opt.terms + attempt, opt.band, true));
        if (!F.is_zero()) return F;
    }
    throw std::invalid_argument("make_closed_field: the symbol kernel is trivial at every sampled frequency");
}

/// Random Gaussian-bump form: one anisotropic bump per component near the cell centre.
inline Form<BumpSeries> random_bump_form(int n, int N, int q, std::mt19937_64& rng, double sigma_lo = 0.25, double sigma_hi = 0.4,
                                         double offset = 0.25) {
    std::uniform_real_distribution<double> amp(0.5, 1.5), sg(sigma_lo, sigma_hi), off(-offset, offset);
    std::bernoulli_distribution flip(0.5);
    Form<BumpSeries> F(n, N, q, BumpSeries(n));
    for (size_t r = 0; r < F.size(); ++r) {
        std::vector<double> c(static_cast<size_t>(n)), w(static_cast<size_t>(n));
        for (int t = 0; t < n; ++t) {
            c[static_cast<size_t>(t)] = M_PI + off(rng);
            w[static_cast<size_t>(t)] = sg(rng);
        }
        double a = amp(rng);
        F[r].add_bump(c, w, std::vector<int>(static_cast<size_t>(n), 0), flip(rng) ? -a : a);
    }
    return F;
}

template <class C>
Form<C> dilate_form(const Form<C>& F, double lambda) {
    Form<C> out = F.zero_like();
    std::vector<double> c(static_cast<size_t>(F.n()), M_PI);
    for (size_t r = 0; r < F.size(); ++r) out[r] = F[r].dilate(lambda, c);
    return out;
}

// ---- Hodge system, l = 1 ------------------------------------------------------------

struct HodgeOptions {
    bool check = true;
    double closure_tol = 1e-8;
    double mean_tol = 1e-10;
};

struct HodgeResult {
    Form<GridField> Z;
    double residual_T = 0;      // ||T~Z - F|| / ||F||
    double residual_Tstar = 0;  // ||T~*Z - G|| / ||G||
    double closure_F = 0;
    double coclosure_G = 0;
};

inline double relative_l2(const Form<GridField>& diff, const Form<GridField>& ref) {
    double r = lp_norm(ref, 2.0);
    double d = lp_norm(diff, 2.0);
    return r > 0 ? d / r : d;
}

/// Z = box^{-1}(T~*F + T~G) through the scalar symbol sum_alpha xi^{2 alpha}.
inline HodgeResult hodge_solve(const OperatorSpec& s, int q, const std::optional<Form<GridField>>& F,
                               const std::optional<Form<GridField>>& G, HodgeOptions opt = {}) {
    if (s.ell() != 1) throw std::invalid_argument("hodge_solve: only l = 1 is supported");
    if (q < 0 || q > s.N()) throw std::invalid_argument("hodge_solve: degree out of range");
    const Form<GridField>* any = F ? &*F : (G ? &*G : nullptr);
    if (!any) throw std::invalid_argument("hodge_solve: need F or G");
    if (F && (F->q() != q + 1)) throw std::invalid_argument("hodge_solve: F must have degree q+1");
    if (G && (G->q() != q - 1)) throw std::invalid_argument("hodge_solve: G must have degree q-1");
    HodgeResult res;
    if (F) detail::check_hybrid(s, *F, "hodge_solve");
    if (G) detail::check_hybrid(s, *G, "hodge_solve");
    if (F && F->q() + 1 <= s.N()) res.closure_F = relative_l2(apply_T(s, *F), *F);
    if (G && G->q() >= 1) res.coclosure_G = relative_l2(apply_T_star(s, *G), *G);
    if (opt.check) {
        if (res.closure_F > opt.closure_tol) throw std::invalid_argument("hodge_solve: F is not closed");
        if (res.coclosure_G > opt.closure_tol) throw std::invalid_argument("hodge_solve: G is not coclosed");
        auto mean_ok = [&](const Form<GridField>& X) {
            double scale = 0;
            for (size_t r = 0; r < X.size(); ++r) scale = std::max(scale, X[r].max_abs());
            for (size_t r = 0; r < X.size(); ++r)
                if (std::abs(X[r].mean()) > opt.mean_tol * std::max(1.0, scale)) return false;
            return true;
        };
        if ((F && !mean_ok(*F)) || (G && !mean_ok(*G))) throw std::invalid_argument("hodge_solve: data must have zero mean");
    }
    Form<GridField> rhs(s.n(), s.N(), q, any->zero_coeff());
    if (F && q + 1 <= s.N()) rhs += apply_T_star(s, *F);
    if (G && q >= 1) rhs += apply_T(s, *G);
    const auto& al = s.alphas();
    Form<GridField> Z = rhs.zero_like();
    for (size_t r = 0; r < rhs.size(); ++r) {
        if (rhs[r].is_zero()) continue;
        Z[r] = rhs[r].apply_multiplier(rhs[r].spectrum(), [&](const std::vector<int>& w) {
            double sym = 0;
            for (const auto& a : al) {
                double m = 1;
                for (size_t t = 0; t < a.size(); ++t)
                    for (int e = 0; e < 2 * a[t]; ++e) m *= w[t];
                sym += m;
            }
            return sym > 0 ? fft::cplx(1.0 / sym) : fft::cplx(0.0);
        });
    }
    res.Z = std::move(Z);
    if (F && q + 1 <= s.N()) res.residual_T = relative_l2(apply_T(s, res.Z) - *F, *F);
    if (G && q >= 1) res.residual_Tstar = relative_l2(apply_T_star(s, res.Z) - *G, *G);
    return res;
}

// ---- ratio probes ------------------------------------------------------------------

/// Closure residual of T~F: exact backends report 0 or 1, grids a relative L2 size.
template <class C>
double closure_residual(const OperatorSpec& s, const Form<C>& F) {
    if (F.q() + s.ell() > s.N()) return 0.0;
    auto TF = apply_T(s, F);
    if constexpr (std::is_same_v<C, GridField>) {
        double f = lp_norm(F, 2.0);
        return f > 0 ? lp_norm(TF, 2.0) / f : lp_norm(TF, 2.0);
    } else {
        return TF.is_zero() ? 0.0 : 1.0;
    }
}

struct RatioParts {
    double numerator = 0, denominator = 0, ratio = 0;
};

/// |<F,H>| / (||F||_1 ||grad H||_n) for T~F = 0.
template <class C>
RatioParts duality_ratio(const OperatorSpec& s, const Form<C>& F, const Form<C>& H, int P = 0, double closure_tol = 1e-10) {
    detail::check_hybrid(s, F, "duality_ratio");
    if (!F.same_shape(H)) throw std::invalid_argument("duality_ratio: F and H must share a degree");
    if (closure_residual(s, F) > closure_tol) throw std::invalid_argument("duality_ratio: F is not closed");
    RatioParts r;
    r.numerator = std::abs(inner_product_sampled(F, H, P));
    r.denominator = lp_norm(F, 1.0, P) * grad_lp_norm(H, static_cast<double>(s.n()), P);
    if (!(r.denominator > 0)) throw std::invalid_argument("duality_ratio: zero denominator");
    r.ratio = r.numerator / r.denominator;
    return r;
}

/// The adjoint statement: T~*G = 0, ratio taken after the star substitution.
template <class C>
RatioParts duality_ratio_star(const OperatorSpec& s, const Form<C>& G, const Form<C>& K, int P = 0, double closure_tol = 1e-10) {
    return duality_ratio(s, hodge_star(G), hodge_star(K), P, closure_tol);
}

inline double sobolev_exponent(int n) { return static_cast<double>(n) / (n - 1); }

struct GnOptions {
    bool homogeneous = false;   // top-order seminorm ||D^{k-1} u||_r only
    bool exploratory = false;   // skip the excluded-degree preconditions
};

/// ||u||_{W^{k-1,r}} / (||T u||_1 + ||T* u||_1), r = n/(n-1).
template <class C>
RatioParts gn_ratio(const OperatorSpec& s, const Form<C>& u, int P = 0, GnOptions opt = {}) {
    detail::check_source(s, u, "gn_ratio");
    const int n = s.n(), q = u.q();
    if (n < 2) throw std::invalid_argument("gn_ratio: n must be >= 2");
    const bool has_T = q + s.ell() <= n;
    const bool has_Ts = q >= s.ell();
    std::optional<Form<C>> Tu, Tsu;
    if (has_T) Tu = apply_Top(s, u);
    if (has_Ts) Tsu = apply_Top_star(s, u);
    if (!opt.exploratory) {
        auto vanishes = [&](const std::optional<Form<C>>& f) {
            if (!f) return true;
            if constexpr (std::is_same_v<C, GridField>) return lp_norm(*f, 2.0) <= 1e-10 * std::max(1.0, lp_norm(u, 2.0));
            else return f->is_zero();
        };
        if (q == 1 && !vanishes(Tsu)) throw std::invalid_argument("gn_ratio: q = 1 requires T*u = 0");
        if (q == n - 1 && !vanishes(Tu)) throw std::invalid_argument("gn_ratio: q = n-1 requires Tu = 0");
    }
    RatioParts r;
    r.numerator = sobolev_norm(u, s.k() - 1, sobolev_exponent(n), P, opt.homogeneous);
    if (Tu) r.denominator += lp_norm(*Tu, 1.0, P);
    if (Tsu) r.denominator += lp_norm(*Tsu, 1.0, P);
    if (!(r.denominator > 0)) throw std::invalid_argument("gn_ratio: zero denominator");
    r.ratio = r.numerator / r.denominator;
    return r;
}

/// Closed form of ||u||_r / ||grad u||_1 for u = exp(-|x|^2 / 2s^2) on R^n,
/// both norms with the (2pi)^-n normalisation.
inline double gaussian_gn_ratio(int n, double s) {
    const double r = sobolev_exponent(n);
    const double two_pi_n = std::pow(2.0 * M_PI, n);
    const double lr = std::pow(std::pow(2.0 * M_PI * s * s / r, 0.5 * n) / two_pi_n, 1.0 / r);
    const double sphere = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    const double radial = std::pow(2.0, 0.5 * (n - 1)) * std::pow(s, n + 1) * std::tgamma(0.5 * (n + 1));
    const double l1 = sphere * radial / (s * s) / two_pi_n;
    return lr / l1;
}

inline Form<BumpSeries> radial_gaussian(int n, double s) {
    Form<BumpSeries> u(n, n, 0, BumpSeries(n));
    u[0].add_bump(std::vector<double>(static_cast<size_t>(n), M_PI), std::vector<double>(static_cast<size_t>(n), s),
                  std::vector<int>(static_cast<size_t>(n), 0), 1.0);
    return u;
}

}  // namespace hodc
