#pragma once

// Principal symbols of the Hodge Laplacians as exact polynomial matrices,
// Legendre-Hadamard quotients and the sphere scan.

#include <Eigen/Dense>
#include <gmpxx.h>

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "operators.hpp"

namespace hodc {

/// Integer polynomial in xi_1..xi_n; exponent vector -> coefficient.
struct Poly {
    std::map<std::vector<int>, mpz_class> terms;

    bool is_zero() const { return terms.empty(); }
    void add(const std::vector<int>& e, const mpz_class& c) {
        if (c == 0) return;
        auto [it, fresh] = terms.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }
    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.terms) add(e, c);
        return *this;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        for (const auto& [ea, ca] : a.terms)
            for (const auto& [eb, cb] : b.terms) {
                std::vector<int> e = ea;
                for (size_t t = 0; t < e.size(); ++t) e[t] += eb[t];
                r.add(e, ca * cb);
            }
        return r;
    }
    bool operator==(const Poly& o) const { return terms == o.terms; }

    mpq_class eval(const std::vector<mpq_class>& xi) const {
        mpq_class s = 0;
        for (const auto& [e, c] : terms) {
            mpq_class v = c;
            for (size_t t = 0; t < e.size(); ++t)
                for (int j = 0; j < e[t]; ++j) v *= xi[t];
            s += v;
        }
        return s;
    }

    /// True when every monomial carries xi_var, so the polynomial vanishes on xi_var = 0.
    bool divisible_by(int var) const {
        for (const auto& [e, c] : terms)
            if (e[static_cast<size_t>(var)] == 0) return false;
        return true;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        // highest powers of xi_1 first
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            const auto& [e, c] = *it;
            mpz_class a = abs(c);
            os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
            bool constant = true;
            for (int v : e) constant = constant && v == 0;
            if (a != 1 || constant) os << a.get_str() << (constant ? "" : "*");
            bool lead = true;
            for (size_t t = 0; t < e.size(); ++t) {
                if (e[t] == 0) continue;
                os << (lead ? "" : "*") << "xi" << (t + 1);
                if (e[t] > 1) os << '^' << e[t];
                lead = false;
            }
            first = false;
        }
        return os.str();
    }
};

using PolyMatrix = std::vector<std::vector<Poly>>;

inline Poly monomial(const std::vector<int>& e, long c) {
    Poly p;
    p.add(e, c);
    return p;
}

/// Symbol of T~ (or T when `source`) at degree q: R_{LI} = sum_alpha eps^{aI}_L xi^alpha.
inline PolyMatrix operator_symbol(const OperatorSpec& s, int q, bool source) {
    const int dim = source ? s.n() : s.N();
    PolyMatrix R(small_binom(dim, q + s.ell()), std::vector<Poly>(small_binom(dim, q)));
    const auto& tab = source ? s.source_couplings(q) : s.couplings(q);
    for (const auto& c : tab) R[c.out][c.in].add(s.alphas()[c.alpha], c.sign);
    return R;
}

/// R_q^T R_q + R_{q-l} R_{q-l}^T: the symbol of the Hodge Laplacian at degree q
/// (factors (-1)^k and i^{2k} cancel).
inline PolyMatrix box_symbol_poly(const OperatorSpec& s, int q, bool source = false) {
    const int dim = source ? s.n() : s.N();
    if (q < 0 || q > dim) throw std::invalid_argument("box_symbol: degree out of range");
    if (source && s.n() < s.ell()) throw std::invalid_argument("box_symbol: n < l");
    const size_t d = small_binom(dim, q);
    PolyMatrix S(d, std::vector<Poly>(d));
    if (q + s.ell() <= dim) {
        auto R = operator_symbol(s, q, source);
        for (size_t L = 0; L < R.size(); ++L)
            for (size_t M = 0; M < d; ++M) {
                if (R[L][M].is_zero()) continue;
                for (size_t I = 0; I < d; ++I)
                    if (!R[L][I].is_zero()) S[M][I] += R[L][M] * R[L][I];
            }
    }
    if (q >= s.ell()) {
        auto R = operator_symbol(s, q - s.ell(), source);
        const size_t dk = small_binom(dim, q - s.ell());
        for (size_t K = 0; K < dk; ++K)
            for (size_t M = 0; M < d; ++M) {
                if (R[M][K].is_zero()) continue;
                for (size_t I = 0; I < d; ++I)
                    if (!R[I][K].is_zero()) S[M][I] += R[M][K] * R[I][K];
            }
    }
    return S;
}

/// sum_{alpha,beta} C~^{MI} xi^{alpha+beta}, the same symbol read off the coefficient tensor.
inline PolyMatrix symbol_from_tensor(const OperatorSpec& s, const CoeffTensor& t) {
    const size_t d = small_binom(s.N(), t.q);
    PolyMatrix S(d, std::vector<Poly>(d));
    for (const auto& [key, v] : t.entries) {
        std::vector<int> e = s.alphas()[key[2]];
        for (size_t u = 0; u < e.size(); ++u) e[u] += s.alphas()[key[3]][u];
        S[key[0]][key[1]].add(e, v);
    }
    return S;
}

using QMatrix = std::vector<std::vector<mpq_class>>;

inline std::vector<mpq_class> source_frequency(const OperatorSpec& s, const std::vector<mpq_class>& xi, bool source) {
    if (static_cast<int>(xi.size()) == s.n()) return xi;
    if (!source && static_cast<int>(xi.size()) == s.N()) {
        for (int t = s.n(); t < s.N(); ++t)
            if (xi[static_cast<size_t>(t)] != 0) throw std::invalid_argument("box_symbol: xi must lie in i(R^n)");
        return std::vector<mpq_class>(xi.begin(), xi.begin() + s.n());
    }
    throw std::invalid_argument("box_symbol: frequency has the wrong length");
}

inline QMatrix eval_matrix(const PolyMatrix& S, const std::vector<mpq_class>& xi) {
    QMatrix out(S.size(), std::vector<mpq_class>(S.size()));
    for (size_t i = 0; i < S.size(); ++i)
        for (size_t j = 0; j < S.size(); ++j) out[i][j] = S[i][j].eval(xi);
    return out;
}

inline QMatrix box_symbol(const OperatorSpec& s, int q, const std::vector<mpq_class>& xi, bool source = false) {
    return eval_matrix(box_symbol_poly(s, q, source), source_frequency(s, xi, source));
}

inline mpq_class norm_sq(const std::vector<mpq_class>& v) {
    mpq_class s = 0;
    for (const auto& x : v) s += x * x;
    return s;
}

inline mpq_class pow_q(const mpq_class& x, int e) {
    mpq_class r = 1;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

/// zeta^T S zeta / (|xi|^{2k} |zeta|^2), exact for rational inputs.
inline mpq_class lh_quotient(const OperatorSpec& s, int q, const std::vector<mpq_class>& xi, const std::vector<mpq_class>& zeta,
                             bool source = false) {
    auto x = source_frequency(s, xi, source);
    mpq_class nx = norm_sq(x), nz = norm_sq(zeta);
    if (nx == 0) throw std::invalid_argument("lh_quotient: xi must be nonzero");
    if (nz == 0) throw std::invalid_argument("lh_quotient: zeta must be nonzero");
    auto S = box_symbol(s, q, x, source);
    if (zeta.size() != S.size()) throw std::invalid_argument("lh_quotient: zeta has the wrong length");
    mpq_class num = 0;
    for (size_t i = 0; i < S.size(); ++i)
        for (size_t j = 0; j < S.size(); ++j) num += zeta[i] * S[i][j] * zeta[j];
    return num / (pow_q(nx, s.k()) * nz);
}

/// Scalar multiple of the identity? Returns the scalar polynomial when so.
inline bool scalar_symbol(const PolyMatrix& S, Poly* scalar = nullptr) {
    for (size_t i = 0; i < S.size(); ++i)
        for (size_t j = 0; j < S.size(); ++j) {
            if (i != j && !S[i][j].is_zero()) return false;
            if (i == j && !(S[i][i] == S[0][0])) return false;
        }
    if (scalar && !S.empty()) *scalar = S[0][0];
    return true;
}

inline double radical_inverse(unsigned long i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

/// Rational directions: axes, (1..1), (0,1..1), then inverse stereographic
/// images of Halton points with coordinates rounded to multiples of 1/1024.
inline std::vector<std::vector<mpq_class>> scan_directions(int n, int samples) {
    static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<std::vector<mpq_class>> out;
    for (int j = 0; j < n; ++j) {
        std::vector<mpq_class> e(static_cast<size_t>(n), 0);
        e[static_cast<size_t>(j)] = 1;
        out.push_back(e);
    }
    out.emplace_back(static_cast<size_t>(n), mpq_class(1));
    if (n >= 2) {
        std::vector<mpq_class> v(static_cast<size_t>(n), mpq_class(1));
        v[0] = 0;
        out.push_back(v);
    }
    for (int i = 1; i <= samples; ++i) {
        std::vector<mpq_class> y(static_cast<size_t>(n - 1));
        mpq_class r2 = 0;
        for (int t = 0; t < n - 1; ++t) {
            double u = radical_inverse(static_cast<unsigned long>(i), primes[t % 12]);
            long p = std::lround((u - 0.5) * 6.0 * 1024.0);
            y[static_cast<size_t>(t)] = mpq_class(p, 1024);
            y[static_cast<size_t>(t)].canonicalize();
            r2 += y[static_cast<size_t>(t)] * y[static_cast<size_t>(t)];
        }
        std::vector<mpq_class> xi(static_cast<size_t>(n));
        for (int t = 0; t < n - 1; ++t) xi[static_cast<size_t>(t)] = 2 * y[static_cast<size_t>(t)] / (r2 + 1);
        xi[static_cast<size_t>(n - 1)] = (r2 - 1) / (r2 + 1);
        bool zero = true;
        for (auto& x : xi) zero = zero && x == 0;
        if (!zero) out.push_back(std::move(xi));
    }
    return out;
}

struct ScanResult {
    double min_quotient = 0;
    std::vector<mpq_class> argmin;
    bool exact = false;  // scalar symbol, quotient computed in rationals
    mpq_class exact_min;
    size_t evaluated = 0;
    bool scalar = false;
    Poly scalar_poly;
};

inline std::vector<std::string> to_strings(const std::vector<mpq_class>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(x.get_str());
    return out;
}

/// Minimum Legendre-Hadamard quotient over the sampled directions.
inline ScanResult ellipticity_scan(const OperatorSpec& s, int q, int samples, bool source = false) {
    const PolyMatrix S = box_symbol_poly(s, q, source);
    ScanResult res;
    res.scalar = scalar_symbol(S, &res.scalar_poly);
    res.exact = res.scalar;
    bool first = true;
    for (const auto& xi : scan_directions(s.n(), samples)) {
        mpq_class den = pow_q(norm_sq(xi), s.k());
        ++res.evaluated;
        if (res.scalar) {
            mpq_class qv = S.empty() ? mpq_class(0) : res.scalar_poly.eval(xi) / den;
            if (first || qv < res.exact_min) {
                res.exact_min = qv;
                res.argmin = xi;
            }
        } else {
            auto Q = eval_matrix(S, xi);
            const int d = static_cast<int>(Q.size());
            Eigen::MatrixXd m(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) m(i, j) = mpq_class(Q[static_cast<size_t>(i)][static_cast<size_t>(j)] / den).get_d();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
            double lmin = es.eigenvalues()(0);
            if (first || lmin < res.min_quotient) {
                res.min_quotient = lmin;
                res.argmin = xi;
            }
        }
        first = false;
    }
    if (res.scalar) res.min_quotient = res.exact_min.get_d();
    return res;
}

}  // namespace hodc
