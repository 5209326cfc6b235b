#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hodc;

namespace {

OperatorSpec spec(int n, int k, int ell, OrderingKind kind = OrderingKind::diagonal) {
    for (const auto& s : admissible_increments(n, k).admissible)
        if (s.ell == ell) return make_spec(n, k, ell, static_cast<int>(s.N), kind);
    throw std::logic_error("no such increment");
}

std::vector<OperatorSpec> small_specs() {
    std::vector<OperatorSpec> out;
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= 3; ++k)
            for (const auto& s : admissible_increments(n, k).admissible) {
                const int N = static_cast<int>(s.N);
                out.push_back(make_spec(n, k, s.ell, N, OrderingKind::lexicographic));
                out.push_back(OperatorSpec(random_ordering(n, k, s.ell, N, 99 + n * 10 + k)));
            }
    return out;
}

}  // namespace

TEST(Operators, FirstOrderIsTheExteriorDerivative) {
    std::mt19937_64 rng(1);
    for (int n = 2; n <= 4; ++n) {
        auto s = spec(n, 1, 1);
        for (int q = 0; q < n; ++q) {
            auto F = random_trig_form(n, n, q, rng, 2, 2);
            EXPECT_EQ(apply_T(s, F), oracle::exterior_d(F));
            EXPECT_EQ(apply_Top(s, F), oracle::exterior_d(F));
        }
    }
}

TEST(Operators, FirstOrderAdjointIsTheCodifferential) {
    std::mt19937_64 rng(2);
    for (int n = 2; n <= 4; ++n) {
        auto s = spec(n, 1, 1);
        for (int q = 1; q <= n; ++q) {
            auto G = random_trig_form(n, n, q, rng, 2, 2);
            // d* = (-1)^{N(q+1)+1} * d * on q-forms
            Form<TrigPoly> ref = hodge_star(oracle::exterior_d(hodge_star(G)));
            if ((n * (q + 1) + 1) % 2) ref = -ref;
            EXPECT_EQ(apply_T_star(s, G), ref);
            EXPECT_EQ(apply_T_star_coordinate(s, G), ref);
        }
    }
}

TEST(Operators, SecondOrderExample) {
    auto s = spec(2, 2, 1);
    Form<TrigPoly> f(2, 3, 0, TrigPoly(2));
    f[0] = TrigPoly::cos_mode({1, 0});
    Form<TrigPoly> expect(2, 3, 1, TrigPoly(2));
    expect.at(Label({1})) = TrigPoly::cos_mode({1, 0}, -1);
    EXPECT_EQ(apply_T(s, f), expect);
    Form<TrigPoly> c(2, 3, 2, TrigPoly(2));
    c[1] = TrigPoly::constant(2, 5);
    EXPECT_TRUE(apply_T(s, c).is_zero());
    EXPECT_THROW(apply_T(s, Form<TrigPoly>(2, 3, 3, TrigPoly(2))), std::invalid_argument);
}

TEST(Operators, DiagonalSourceOperatorHasTheExplicitForm) {
    std::mt19937_64 rng(3);
    for (int k = 1; k <= 3; ++k) {
        auto s = spec(3, k, 1);
        for (int q = 0; q <= 2; ++q) {
            auto u = random_trig_form(3, 3, q, rng, 2, 2);
            Form<TrigPoly> ref = u.zero_of_degree(q + 1);
            for (size_t L = 0; L < ref.size(); ++L)
                for (size_t I = 0; I < u.size(); ++I)
                    for (int j = 1; j <= 3; ++j) {
                        int e = oracle::eps(Label({j}), u.label(I), ref.label(L));
                        if (!e) continue;
                        std::vector<int> a(3, 0);
                        a[static_cast<size_t>(j - 1)] = k;
                        ref[L].add_scaled(u[I].derivative(a), e);
                    }
            EXPECT_EQ(apply_Top(s, u), ref);
        }
        Form<TrigPoly> top(3, 3, 3, TrigPoly(3));
        top[0] = TrigPoly::cos_mode({1, 1, 0});
        EXPECT_TRUE(apply_Top(s, top).is_zero());
        // adjoint on 1-forms: the k-th order divergence, up to sign
        auto g = random_trig_form(3, 3, 1, rng, 2, 2);
        TrigPoly div(3);
        for (int j = 0; j < 3; ++j) {
            std::vector<int> a(3, 0);
            a[static_cast<size_t>(j)] = k;
            div += g[static_cast<size_t>(j)].derivative(a);
        }
        auto ts = apply_Top_star(s, g)[0];
        EXPECT_TRUE(ts == div || ts == -div);
    }
}

TEST(Operators, AdjointnessIsExact) {
    std::mt19937_64 rng(4);
    for (const auto& s : small_specs())
        for (int q = 0; q + s.ell() <= s.N(); ++q) {
            auto F = random_trig_form(s.n(), s.N(), q, rng, 2, 2);
            auto G = random_trig_form(s.n(), s.N(), q + s.ell(), rng, 2, 2);
            EXPECT_EQ(inner_product(apply_T(s, F), G), inner_product(F, apply_T_star(s, G))) << s.describe();
            EXPECT_EQ(apply_T_star(s, G), apply_T_star_coordinate(s, G)) << s.describe();
        }
}

TEST(Operators, LiteralCoordinateSignDiffersForOddNl) {
    auto s = spec(2, 2, 1);  // N l = 3
    std::mt19937_64 rng(5);
    auto G = random_trig_form(2, 3, 1, rng, 2, 2);
    EXPECT_EQ(apply_T_star_coordinate_literal(s, G), -apply_T_star(s, G));
}

TEST(Operators, SourceAdjointRoutesAgree) {
    std::mt19937_64 rng(6);
    for (const auto& s : small_specs()) {
        if (s.ell() > s.n()) continue;
        for (int q = 0; q + s.ell() <= s.n(); ++q) {
            auto f = random_trig_form(s.n(), s.n(), q, rng, 2, 2);
            auto g = random_trig_form(s.n(), s.n(), q + s.ell(), rng, 2, 2);
            EXPECT_EQ(inner_product(apply_Top(s, f), g), inner_product(f, apply_Top_star(s, g)));
            EXPECT_EQ(apply_Top_star(s, g), apply_Top_star_restricted(s, g));
        }
    }
}

TEST(Operators, CompositionVanishesExactlyForOddIncrements) {
    std::mt19937_64 rng(7);
    for (const auto& s : small_specs())
        for (int q = 0; q + 2 * s.ell() <= s.N(); ++q) {
            auto r = compose_TT(s, q);
            ASSERT_TRUE(r.applicable);
            EXPECT_TRUE(r.factor_holds) << s.describe();
            if (s.ell() % 2) {
                EXPECT_EQ(r.max_abs_coeff, 0) << s.describe();
                EXPECT_TRUE(apply_T(s, apply_T(s, random_trig_form(s.n(), s.N(), q, rng, 2, 2))).is_zero());
            }
        }
}

TEST(Operators, CompositionForEvenIncrement) {
    auto s = spec(3, 2, 2, OrderingKind::lexicographic);  // N = 4
    auto r = compose_TT(s, 0);
    EXPECT_TRUE(r.applicable);
    EXPECT_GT(r.max_abs_coeff, 0);
    EXPECT_EQ(r.max_abs_coeff, 2 * r.max_abs_single);
    EXPECT_TRUE(r.factor_holds);
    // (n,k,l) = (2,2,2): N = 3 leaves no room for two steps
    EXPECT_FALSE(compose_TT(spec(2, 2, 2, OrderingKind::lexicographic), 0).applicable);
    // (n,k,l) = (2,9,3): N = 5, T~T~ on functions lands in degree 6
    auto t = spec(2, 9, 3, OrderingKind::lexicographic);
    EXPECT_FALSE(compose_TT(t, 0).applicable);
    Form<TrigPoly> f(2, 5, 0, TrigPoly(2));
    f[0] = TrigPoly::cos_mode({1, 2});
    EXPECT_TRUE(apply_T_unchecked(t, apply_T_unchecked(t, f)).is_zero());
}

TEST(Laplacian, TensorMatchesTheDefiningSum) {
    for (const auto& s : small_specs()) {
        if (s.N() > 6) continue;
        for (int q = 0; q <= s.N(); ++q) {
            auto t = box_coeff_tensor(s, q);
            EXPECT_EQ(t.entries, oracle::naive_tensor(s, q)) << s.describe() << " q=" << q;
            for (const auto& [key, v] : t.entries) EXPECT_LE(std::abs(v), 2);
        }
    }
}

TEST(Laplacian, KroneckerForUnitIncrement) {
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= 3; ++k) {
            auto s = spec(n, k, 1, OrderingKind::lexicographic);
            for (int q = 0; q <= s.N(); ++q) EXPECT_TRUE(is_kronecker(box_coeff_tensor(s, q), s.alphas().size()));
        }
}

TEST(Laplacian, ClosedFormMatchesDirectSum) {
    for (const auto& s : small_specs()) {
        if (s.ell() < 2) continue;
        for (int q = 0; q <= s.N(); ++q) EXPECT_TRUE(box_coeff_closed_form(s, q) == box_coeff_tensor(s, q)) << s.describe();
    }
}

TEST(Laplacian, SingleTermClosingFormulaIsNotTheTensor) {
    auto s = spec(2, 2, 2, OrderingKind::lexicographic);
    bool differs = false;
    for (int q = 0; q <= s.N(); ++q) differs = differs || !(box_coeff_literal(s, q) == box_coeff_tensor(s, q));
    EXPECT_TRUE(differs);
}

TEST(Laplacian, EvenIncrementShowsDoubledEntries) {
    auto s = spec(3, 2, 2, OrderingKind::lexicographic);  // N = 4 fits two disjoint labels
    bool two = false;
    for (int q = 0; q <= s.N(); ++q)
        for (const auto& [key, v] : box_coeff_tensor(s, q).entries)
            if ((s.label_mask(key[2]) & s.label_mask(key[3])) == 0 && std::abs(v) == 2) two = true;
    EXPECT_TRUE(two);
}

TEST(Laplacian, ApplyMatchesContractionAndIsNonNegative) {
    std::mt19937_64 rng(8);
    for (const auto& s : small_specs()) {
        if (s.N() > 6) continue;
        for (int q = 0; q <= s.N(); ++q) {
            auto H = random_trig_form(s.n(), s.N(), q, rng, 2, 2);
            auto B = box_apply(s, H);
            EXPECT_EQ(B, box_contract(s, box_coeff_tensor(s, q), H));
            EXPECT_GE(inner_product(B, H), 0);
        }
    }
}

TEST(Laplacian, Examples) {
    auto s = spec(2, 2, 1);
    Form<TrigPoly> H(2, 3, 0, TrigPoly(2));
    H[0] = TrigPoly::cos_mode({1, 0});
    EXPECT_EQ(box_apply(s, H), H);  // d^4/dx1^4 cos x1
    for (int n = 2; n <= 3; ++n) {
        auto d = spec(n, 1, 1);
        std::mt19937_64 rng(9);
        Form<TrigPoly> h(n, n, 0, TrigPoly(n));
        h[0] = random_trigpoly(n, rng, 3, 3);
        Form<TrigPoly> lap = h.zero_like();
        for (int j = 0; j < n; ++j) {
            std::vector<int> a(static_cast<size_t>(n), 0);
            a[static_cast<size_t>(j)] = 2;
            lap[0] -= h[0].derivative(a);
        }
        EXPECT_EQ(box_apply(d, h), lap);
    }
    Form<TrigPoly> c(2, 3, 1, TrigPoly(2));
    c[2] = TrigPoly::constant(2, 4);
    EXPECT_TRUE(box_apply(s, c).is_zero());
}

TEST(Invariance, ExactForSignedPermutationsWhenFirstOrder) {
    std::mt19937_64 rng(10);
    for (int n = 2; n <= 3; ++n) {
        auto s = spec(n, 1, 1);
        std::vector<int> perm(static_cast<size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int t = 0; t < 6; ++t) {
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<int> A(static_cast<size_t>(n * n), 0);
            for (int i = 0; i < n; ++i) A[static_cast<size_t>(i * n + perm[static_cast<size_t>(i)])] = (t + i) % 2 ? -1 : 1;
            for (int q = 0; q < n; ++q)
                EXPECT_TRUE(invariance_defect_exact(s, A, random_trig_form(n, n, q, rng, 2, 2)).is_zero());
        }
    }
}

TEST(Invariance, SecondOrderBreaksUnderRotation) {
    auto s = spec(2, 2, 1);
    Form<BumpSeries> f(2, 3, 0, BumpSeries(2));
    f[0].add_bump({M_PI + 0.2, M_PI - 0.1}, {0.5, 0.4}, {0, 0}, 1.0);
    const double c = std::sqrt(0.5);
    EXPECT_GT(invariance_defect(s, {c, -c, c, c}, to_grid(f, 32)), 1e-3);
    EXPECT_THROW(invariance_defect(s, {1, 1, 0, 1}, to_grid(f, 32)), std::invalid_argument);
}
