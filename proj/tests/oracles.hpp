#pragma once

// Slow, independent reference implementations used only by the tests.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <vector>

#include "hodc/hodc.hpp"

namespace oracle {

/// Sign of the rearrangement seq -> target by counting adjacent swaps.
inline int bubble_sign(std::vector<int> seq, const std::vector<int>& target) {
    if (seq.size() != target.size()) return 0;
    std::vector<int> pos;
    for (int v : seq) {
        auto it = std::find(target.begin(), target.end(), v);
        if (it == target.end()) return 0;
        pos.push_back(static_cast<int>(it - target.begin()));
    }
    std::vector<int> chk = pos;
    std::sort(chk.begin(), chk.end());
    for (size_t i = 0; i < chk.size(); ++i)
        if (chk[i] != static_cast<int>(i)) return 0;
    int swaps = 0;
    for (size_t i = 0; i < pos.size(); ++i)
        for (size_t j = 0; j + 1 < pos.size() - i; ++j)
            if (pos[j] > pos[j + 1]) {
                std::swap(pos[j], pos[j + 1]);
                ++swaps;
            }
    return swaps % 2 ? -1 : 1;
}

inline int eps(const hodc::Label& a, const hodc::Label& b, const hodc::Label& L) {
    std::vector<int> seq = a.idx;
    seq.insert(seq.end(), b.idx.begin(), b.idx.end());
    return bubble_sign(seq, L.idx);
}

/// Binomial table by Pascal's rule.
inline std::vector<std::vector<mpz_class>> pascal(int rows) {
    std::vector<std::vector<mpz_class>> t(static_cast<size_t>(rows + 1));
    for (int a = 0; a <= rows; ++a) {
        t[static_cast<size_t>(a)].assign(static_cast<size_t>(a + 1), 1);
        for (int b = 1; b < a; ++b)
            t[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                t[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)] + t[static_cast<size_t>(a - 1)][static_cast<size_t>(b)];
    }
    return t;
}

/// All q-subsets of {1..N}, by bitmask scan.
inline std::vector<hodc::Label> subsets(int N, int q) {
    std::vector<hodc::Label> out;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << N); ++m)
        if (__builtin_popcountll(m) == q) out.push_back(hodc::label_from_mask(m));
    std::sort(out.begin(), out.end(), [](const hodc::Label& a, const hodc::Label& b) { return a.idx < b.idx; });
    return out;
}

/// Classical exterior derivative on hybrid trig forms (variables past n are inert).
inline hodc::Form<hodc::TrigPoly> exterior_d(const hodc::Form<hodc::TrigPoly>& F) {
    hodc::Form<hodc::TrigPoly> out = F.zero_of_degree(F.q() + 1);
    for (size_t r = 0; r < out.size(); ++r) {
        const auto& L = out.label(r);
        for (int p = 0; p < L.size(); ++p) {
            const int j = L.idx[static_cast<size_t>(p)];
            if (j > F.n()) continue;
            std::vector<int> rest;
            for (int t = 0; t < L.size(); ++t)
                if (t != p) rest.push_back(L.idx[static_cast<size_t>(t)]);
            std::vector<int> d(static_cast<size_t>(F.n()), 0);
            d[static_cast<size_t>(j - 1)] = 1;
            hodc::TrigPoly term = F.at(hodc::Label(rest)).derivative(d);
            if (p % 2) out[r] -= term;
            else out[r] += term;
        }
    }
    return out;
}

/// Coefficient tensor straight from its defining double sum, with span signs.
inline std::map<std::array<std::uint32_t, 4>, int> naive_tensor(const hodc::OperatorSpec& s, int q) {
    std::map<std::array<std::uint32_t, 4>, int> t;
    const int N = s.N(), ell = s.ell();
    const auto labs = subsets(N, q);
    const auto up = q + ell <= N ? subsets(N, q + ell) : std::vector<hodc::Label>{};
    const auto down = q >= ell ? subsets(N, q - ell) : std::vector<hodc::Label>{};
    const size_t m = s.alphas().size();
    for (size_t M = 0; M < labs.size(); ++M)
        for (size_t I = 0; I < labs.size(); ++I)
            for (size_t a = 0; a < m; ++a)
                for (size_t b = 0; b < m; ++b) {
                    const auto& la = s.ordering().label_of(a);
                    const auto& lb = s.ordering().label_of(b);
                    int v = 0;
                    for (const auto& L : up) v += eps(la, labs[I], L) * eps(lb, labs[M], L);
                    for (const auto& K : down) v += eps(la, K, labs[M]) * eps(lb, K, labs[I]);
                    if (v)
                        t[{static_cast<std::uint32_t>(M), static_cast<std::uint32_t>(I), static_cast<std::uint32_t>(a),
                           static_cast<std::uint32_t>(b)}] = v;
                }
    return t;
}

/// Exact (2pi)^-n integral of a trig polynomial product via its mean.
inline mpq_class pairing(const hodc::TrigPoly& a, const hodc::TrigPoly& b) { return (a * b).mean(); }

}  // namespace oracle
