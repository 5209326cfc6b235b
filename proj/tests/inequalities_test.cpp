#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hodc;

namespace {

OperatorSpec spec(int n, int k, int ell, OrderingKind kind = OrderingKind::lexicographic) {
    for (const auto& s : admissible_increments(n, k).admissible)
        if (s.ell == ell) return make_spec(n, k, ell, static_cast<int>(s.N), kind);
    throw std::logic_error("no such increment");
}

Label full_label(int N) {
    std::vector<int> v(static_cast<size_t>(N));
    std::iota(v.begin(), v.end(), 1);
    return Label(v);
}

}  // namespace

TEST(Reduction, DivergenceIsTheLabelledComponent) {
    std::mt19937_64 rng(1);
    for (auto s : {spec(2, 1, 1), spec(2, 2, 1), spec(2, 2, 2), spec(3, 2, 1), spec(3, 2, 2)}) {
        for (int q = 1; q + s.ell() <= s.N(); ++q) {
            auto F = random_trig_form(s.n(), s.N(), q, rng, 2, 2);
            auto TF = apply_T(s, F);
            for (size_t L = 0; L < TF.size(); ++L) {
                auto r = vs_reduction(s, F, F, TF.label(L));
                EXPECT_EQ(divergence_k(s, r.g), TF[L]) << s.describe();
            }
        }
    }
}

TEST(Reduction, ClosedFieldsGiveDivergenceFreeFamilies) {
    for (auto s : {spec(2, 2, 1), spec(3, 2, 1), spec(2, 3, 1)}) {
        for (int q = s.ell(); q + s.ell() <= s.N(); ++q) {
            auto F = make_closed_field(s, q, 11 + q);
            ASSERT_FALSE(F.is_zero());
            ASSERT_TRUE(apply_T(s, F).is_zero());
            for (const auto& L0 : enum_labels(s.N(), q + s.ell()))
                EXPECT_TRUE(divergence_k(s, vs_reduction(s, F, F, L0).g).is_zero());
        }
    }
}

TEST(Reduction, FunctionsAreCopied) {
    auto s = spec(2, 2, 1);
    std::mt19937_64 rng(2);
    auto F = random_trig_form(2, 3, 0, rng, 2, 2), H = random_trig_form(2, 3, 0, rng, 2, 2);
    auto r = vs_reduction(s, F, H, Label({2}));
    ASSERT_EQ(r.g.size(), 3u);
    for (size_t a = 0; a < 3; ++a) {
        EXPECT_EQ(r.g[a], F[0]);
        EXPECT_EQ(r.h[a], H[0]);
    }
    EXPECT_THROW(vs_reduction(s, F, H, Label({1, 2})), std::invalid_argument);
    EXPECT_THROW(vs_reduction(s, random_trig_form(2, 3, 1, rng, 1, 1), H, Label({1, 2})), std::invalid_argument);
}

TEST(Reduction, LiftIsClosedForDivergenceFreeFamilies) {
    std::mt19937_64 rng(3);
    for (auto s : {spec(2, 1, 1), spec(2, 2, 1), spec(2, 2, 2), spec(3, 2, 2)}) {
        std::vector<TrigPoly> g;
        for (size_t a = 0; a < s.alphas().size(); ++a) g.push_back(random_trigpoly(s.n(), rng, 2, 2));
        auto F = vs_lift(s, g);
        EXPECT_EQ(F.q(), s.N() - s.ell());
        auto TF = apply_T(s, F);
        ASSERT_EQ(TF.size(), 1u);
        EXPECT_EQ(TF[0], divergence_k(s, g));
        auto back = vs_reduction(s, F, F, full_label(s.N()));
        EXPECT_EQ(back.g, g);
    }
}

TEST(Reduction, ExplicitFirstOrderExample) {
    // n = 2, k = 1: g = (sin x2, sin x1) is divergence free
    auto s = spec(2, 1, 1);
    std::vector<TrigPoly> g{TrigPoly::sin_mode({0, 1}), TrigPoly::sin_mode({1, 0})};
    auto F = vs_lift(s, g);
    Form<TrigPoly> expect(2, 2, 1, TrigPoly(2));
    expect.at(Label({1})) = TrigPoly::sin_mode({1, 0}, -1);
    expect.at(Label({2})) = TrigPoly::sin_mode({0, 1});
    EXPECT_EQ(F, expect);
    EXPECT_TRUE(apply_T(s, F).is_zero());
}

TEST(ClosedFields, ProjectionForEvenIncrement) {
    auto s = spec(3, 2, 2);
    std::mt19937_64 rng(4);
    for (int q = 0; q + 2 <= s.N(); ++q) {
        auto F = random_trig_form(3, 4, q, rng, 3, 2, true);
        auto P = project_closed(s, F);
        EXPECT_TRUE(apply_T(s, P).is_zero());
        EXPECT_EQ(project_closed(s, P), P);
        EXPECT_GE(inner_product(F, F), inner_product(P, P));
    }
    auto C = make_closed_field(s, 1, 5);
    EXPECT_FALSE(C.is_zero());
    EXPECT_TRUE(apply_T(s, C).is_zero());
    auto top = make_closed_field(s, 3, 5);
    EXPECT_EQ(top.q(), 3);
}

TEST(Hodge, FirstOrderSolveRecoversData) {
    auto s = spec(2, 1, 1);
    std::mt19937_64 rng(5);
    Form<TrigPoly> Phi(2, 2, 0, TrigPoly(2));
    Phi[0] = random_trigpoly(2, rng, 4, 4);
    Form<TrigPoly> Psi(2, 2, 2, TrigPoly(2));
    Psi[0] = random_trigpoly(2, rng, 4, 4);
    // q = 1: F of degree 2, G of degree 0
    auto F = to_grid(apply_T(s, apply_T_star(s, Psi)), 32);  // dd* Psi, a closed 2-form
    auto G = to_grid(apply_T_star(s, apply_T(s, Phi)), 32);  // d*d Phi, mean zero
    auto r = hodge_solve(s, 1, F, G);
    EXPECT_LT(r.residual_T, 1e-10);
    EXPECT_LT(r.residual_Tstar, 1e-10);
    EXPECT_LT(r.closure_F, 1e-12);
}

TEST(Hodge, ZeroDataAndRejections) {
    auto s = spec(2, 2, 1);
    Form<GridField> F(2, 3, 2, GridField(2, 16));
    auto r = hodge_solve(s, 1, F, std::nullopt);
    EXPECT_TRUE(r.Z.is_zero());
    EXPECT_EQ(r.residual_T, 0.0);
    Form<TrigPoly> bad(2, 3, 2, TrigPoly(2));
    bad.at(Label({2, 3})) = TrigPoly::cos_mode({1, 0});
    EXPECT_THROW(hodge_solve(s, 1, to_grid(bad, 16), std::nullopt), std::invalid_argument);
    Form<TrigPoly> mean(2, 3, 3, TrigPoly(2));
    mean[0] = TrigPoly::constant(2, 1);
    EXPECT_THROW(hodge_solve(s, 2, to_grid(mean, 16), std::nullopt), std::invalid_argument);
    EXPECT_THROW(hodge_solve(spec(2, 2, 2), 1, F, std::nullopt), std::invalid_argument);
    EXPECT_THROW(hodge_solve(s, 1, std::nullopt, std::nullopt), std::invalid_argument);
}

TEST(Ratios, DualityRatioOnClosedFields) {
    std::mt19937_64 rng(6);
    auto s = spec(2, 2, 1);
    for (int t = 0; t < 5; ++t) {
        auto Phi = random_bump_form(2, 3, 0, rng);
        auto F = apply_T(s, Phi);
        auto H = random_bump_form(2, 3, 1, rng);
        auto r = duality_ratio(s, to_grid(F, 64), to_grid(H, 64));
        EXPECT_TRUE(std::isfinite(r.ratio));
        EXPECT_GT(r.ratio, 0);
        EXPECT_NEAR(r.numerator, std::abs(inner_product_sampled(F, H, 64)), 1e-12);
    }
    auto open = random_bump_form(2, 3, 1, rng);
    EXPECT_THROW(duality_ratio(s, open, open, 64), std::invalid_argument);
}

TEST(Ratios, GnPreconditions) {
    auto s = spec(2, 1, 1);
    std::mt19937_64 rng(7);
    auto u = random_bump_form(2, 2, 1, rng);
    EXPECT_THROW(gn_ratio(s, u, 64), std::invalid_argument);
    GnOptions ex;
    ex.exploratory = true;
    EXPECT_TRUE(std::isfinite(gn_ratio(s, u, 64, ex).ratio));
    auto f = random_bump_form(2, 2, 0, rng);
    auto r = gn_ratio(s, f, 64);
    EXPECT_GT(r.ratio, 0);
}

TEST(Ratios, GaussianMatchesClosedForm) {
    for (int n = 2; n <= 3; ++n) {
        auto s = spec(n, 1, 1);
        auto r = gn_ratio(s, radial_gaussian(n, 0.35), n == 2 ? 128 : 64);
        EXPECT_NEAR(r.ratio / gaussian_gn_ratio(n, 0.35), 1.0, 1e-3) << n;
    }
}
