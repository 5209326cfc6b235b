#pragma once

// Admissible degree increments: l with C(N,l) = C(n-1+k,k), N >= n-1+l.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace hodc {

inline mpz_class binom(unsigned long a, unsigned long b) {
    mpz_class r;
    if (b > a) return r;  // zero
    mpz_bin_uiui(r.get_mpz_t(), a, b);
    return r;
}

struct IncrementSolution {
    int ell = 0;
    long N = 0;
    mpz_class m;
    bool operator==(const IncrementSolution& o) const { return ell == o.ell && N == o.N && m == o.m; }
};

struct IncrementResult {
    int n = 0, k = 0;
    mpz_class m;
    std::vector<IncrementSolution> admissible;
    // integer roots of C(N,l)=m that violate N >= n-1+l
    std::vector<IncrementSolution> rejected_by_dimension;
};

/// Smallest N >= l with C(N,l) >= m, by doubling then bisection.
inline long binom_root(int ell, const mpz_class& m) {
    long lo = ell, hi = ell;
    while (binom(static_cast<unsigned long>(hi), static_cast<unsigned long>(ell)) < m) hi = hi * 2 + 1;
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (binom(static_cast<unsigned long>(mid), static_cast<unsigned long>(ell)) < m) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

inline IncrementResult admissible_increments(int n, int k) {
    if (n < 2) throw std::invalid_argument("admissible_increments: n must be >= 2");
    if (k < 1) throw std::invalid_argument("admissible_increments: k must be >= 1");
    IncrementResult res;
    res.n = n;
    res.k = k;
    res.m = binom(static_cast<unsigned long>(n - 1 + k), static_cast<unsigned long>(k));
    for (int ell = 1; ell <= k; ++ell) {
        long N = binom_root(ell, res.m);
        if (binom(static_cast<unsigned long>(N), static_cast<unsigned long>(ell)) != res.m) continue;
        IncrementSolution s{ell, N, res.m};
        if (N >= n - 1 + ell) res.admissible.push_back(s);
        else res.rejected_by_dimension.push_back(s);
    }
    return res;
}

}  // namespace hodc
