#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hodc;

namespace {

Form<TrigPoly> one_form(int n, int N, int q, const Label& L, const TrigPoly& c) {
    Form<TrigPoly> F(n, N, q, TrigPoly(n));
    F.at(L) = c;
    return F;
}

}  // namespace

TEST(Forms, PartialDerivatives) {
    auto F = one_form(2, 2, 1, Label({2}), TrigPoly::cos_mode({1, 0}));
    auto D = partial(F, MultiIndex({1, 0}));
    EXPECT_EQ(D.at(Label({2})), TrigPoly::sin_mode({1, 0}, -1));
    auto C = one_form(2, 3, 1, Label({1}), TrigPoly::constant(2, 3));
    EXPECT_TRUE(partial(C, MultiIndex({1, 1, 0})).is_zero());
    std::mt19937_64 rng(1);
    auto G = random_trig_form(2, 3, 1, rng, 2, 2);
    EXPECT_TRUE(partial(G, MultiIndex({0, 0, 1})).is_zero());
}

TEST(Forms, HodgeStarExamples) {
    auto dx1 = one_form(2, 2, 1, Label({1}), TrigPoly::constant(2, 1));
    auto dx2 = one_form(2, 2, 1, Label({2}), TrigPoly::constant(2, 1));
    EXPECT_EQ(hodge_star(dx1), dx2);
    EXPECT_EQ(hodge_star(dx2), -dx1);
    auto one = one_form(2, 3, 0, Label(), TrigPoly::constant(2, 1));
    EXPECT_EQ(hodge_star(one), one_form(2, 3, 3, Label({1, 2, 3}), TrigPoly::constant(2, 1)));
}

TEST(Forms, StarTwiceIsSignedIdentity) {
    std::mt19937_64 rng(2);
    for (int N = 2; N <= 5; ++N)
        for (int q = 0; q <= N; ++q) {
            auto F = random_trig_form(2, N, q, rng, 2, 2);
            Form<TrigPoly> expect = (q * (N - q)) % 2 ? -F : F;
            EXPECT_EQ(hodge_star(hodge_star(F)), expect);
        }
}

TEST(Forms, WedgeLaws) {
    auto c = TrigPoly::constant(3, 1);
    auto dx1 = one_form(3, 3, 1, Label({1}), c), dx2 = one_form(3, 3, 1, Label({2}), c), dx3 = one_form(3, 3, 1, Label({3}), c);
    EXPECT_EQ(wedge(dx1, dx2), -wedge(dx2, dx1));
    EXPECT_EQ(wedge(wedge(dx1, dx2), dx3), wedge(dx1, wedge(dx2, dx3)));
    std::mt19937_64 rng(3);
    auto f = one_form(3, 3, 0, Label(), random_trigpoly(3, rng, 2, 2));
    auto G = random_trig_form(3, 3, 2, rng, 2, 2);
    Form<TrigPoly> fG = G;
    for (size_t r = 0; r < fG.size(); ++r) fG[r] = f[0] * G[r];
    EXPECT_EQ(wedge(f, G), fG);
    EXPECT_THROW(wedge(G, G), std::invalid_argument);
}

TEST(Forms, InnerProducts) {
    auto c = TrigPoly::constant(2, 1);
    EXPECT_EQ(inner_product(one_form(2, 2, 1, Label({1}), c), one_form(2, 2, 1, Label({2}), c)), 0);
    auto F = one_form(2, 2, 1, Label({1}), TrigPoly::cos_mode({1, 0}));
    EXPECT_EQ(inner_product(F, F), mpq_class(1, 2));
    EXPECT_EQ(inner_product_wedge(F, F), mpq_class(1, 2));
    EXPECT_EQ(inner_product(F.zero_like(), F.zero_like()), 0);
    EXPECT_NEAR(lp_norm(F, 2.0, 16) * lp_norm(F, 2.0, 16), 0.5, 1e-14);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const int N = 2 + t % 3, q = t % (N + 1);
        auto A = random_trig_form(2, N, q, rng, 2, 2), B = random_trig_form(2, N, q, rng, 2, 2);
        EXPECT_EQ(inner_product(A, B), inner_product_wedge(A, B));
        EXPECT_GE(inner_product(A, A), 0);
        EXPECT_NEAR(inner_product_sampled(A, B, 16), inner_product(A, B).get_d(), 1e-12);
    }
}

TEST(Forms, Norms) {
    auto F = one_form(2, 3, 1, Label({2}), TrigPoly::constant(2, -3));
    for (double p : {1.0, 1.5, 2.0, 3.0}) EXPECT_NEAR(lp_norm(F, p, 8), 3.0, 1e-13);
    EXPECT_EQ(lp_norm(F.zero_like(), 2.0, 8), 0.0);
    EXPECT_EQ(grad_lp_norm(F, 2.0, 8), 0.0);
    EXPECT_NEAR(sobolev_norm(F, 2, 2.0, 8), 3.0, 1e-13);
    auto u = one_form(1, 1, 0, Label(), TrigPoly::cos_mode({1}));
    EXPECT_NEAR(sobolev_norm(u, 1, 2.0, 16), 1.0, 1e-14);
    auto s = one_form(1, 1, 0, Label(), TrigPoly::sin_mode({1}));
    EXPECT_NEAR(grad_lp_norm(s, 2.0, 16), std::sqrt(0.5), 1e-14);
    std::mt19937_64 rng(5);
    auto G = random_trig_form(2, 3, 1, rng, 3, 3);
    const double a1 = sobolev_norm(G, 1, 2.0, 32), a0 = sobolev_norm(G, 0, 2.0, 32);
    EXPECT_NEAR(grad_lp_norm(G, 2.0, 32), std::sqrt(a1 * a1 - a0 * a0), 1e-10);
    EXPECT_NEAR(sobolev_norm(G, 0, 1.7, 32), [&] {
        double t = 0;
        for (size_t r = 0; r < G.size(); ++r) {
            auto v = G[r].sample(32);
            double acc = 0;
            for (double x : v) acc += std::pow(std::abs(x), 1.7);
            t += acc / static_cast<double>(v.size());
        }
        return std::pow(t, 1 / 1.7);
    }(), 1e-12);
    EXPECT_THROW(lp_norm(G, 0.5, 8), std::invalid_argument);
}

TEST(Forms, PullbackByPermutations) {
    std::mt19937_64 rng(6);
    auto F = random_trig_form(2, 3, 1, rng, 2, 2);
    std::vector<int> I{1, 0, 0, 1};
    EXPECT_EQ(pullback_linear(F, I), F);
    auto dx1 = one_form(2, 2, 1, Label({1}), TrigPoly::constant(2, 1));
    EXPECT_EQ(pullback_linear(dx1, std::vector<int>{0, 1, 1, 0}), one_form(2, 2, 1, Label({2}), TrigPoly::constant(2, 1)));
    for (std::vector<int> A : {std::vector<int>{0, 1, 1, 0}, {0, -1, 1, 0}, {-1, 0, 0, 1}})
        for (int q = 0; q <= 2; ++q) {
            auto G = random_trig_form(2, 3, q, rng, 2, 2);
            EXPECT_EQ(pullback_linear(oracle::exterior_d(G), A), oracle::exterior_d(pullback_linear(G, A)));
        }
}

TEST(Forms, GridPullbackRotatesAboutTheCentre) {
    const int P = 32;
    BumpSeries b(2);
    b.add_bump({M_PI + 0.5, M_PI}, {0.45, 0.45}, {0, 0}, 1.0);
    Form<BumpSeries> F(2, 2, 0, BumpSeries(2));
    F[0] = b;
    auto G = pullback_linear(to_grid(F, P), std::vector<double>{0, -1, 1, 0});
    // (psi^*f)(x) = f(c + A(x - c)): the bump moves to c + A^T (0.5, 0)
    BumpSeries moved(2);
    moved.add_bump({M_PI, M_PI - 0.5}, {0.45, 0.45}, {0, 0}, 1.0);
    auto ref = moved.sample(P);
    for (size_t i = 0; i < ref.size(); ++i) {
        // preimage of (x1, 0) is (2pi, x1), outside the cell
        if (i % P == 0) EXPECT_EQ(G[0][i], 0.0);
        else EXPECT_NEAR(G[0][i], ref[i], 1e-9);
    }
}

TEST(Forms, JsonRoundTrips) {
    std::mt19937_64 rng(7);
    auto F = random_trig_form(2, 3, 2, rng, 3, 3);
    EXPECT_EQ(form_from_json<TrigPoly>(json::parse(to_json(F).dump())), F);
    auto G = to_grid(F, 8);
    auto G2 = form_from_json<GridField>(json::parse(to_json(G).dump()));
    for (size_t r = 0; r < G.size(); ++r) EXPECT_EQ(G2[r].samples(), G[r].samples());
    auto B = random_bump_form(2, 3, 1, rng);
    auto B2 = form_from_json<BumpSeries>(json::parse(to_json(B).dump()));
    EXPECT_EQ(B2[0].sample(8), B[0].sample(8));
    for (std::string s : std::vector<std::string>{"", "a", "ab", "abc", "abcd", std::string("\0\xff\x10", 3)}) EXPECT_EQ(base64_decode(base64_encode(s)), s);
    EXPECT_EQ(base64_encode("Man"), "TWFu");
    EXPECT_EQ(base64_encode("Ma"), "TWE=");
}
