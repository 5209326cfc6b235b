#pragma once

// Exact identity checks and symbol checks over a range of specs.

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "inequalities.hpp"
#include "io.hpp"
#include "symbol.hpp"

namespace hodc {

struct VerifyLimits {
    int max_n = 3;
    int max_k = 3;
    int max_N = 12;
    int forms = 20;
    int random_orderings = 5;
    int terms = 2;
    int band = 3;
    int scan_samples = 256;
    std::uint64_t seed = 1;
    bool sign_fault = false;
};

inline json limits_json(const VerifyLimits& L) {
    return json{{"max_n", L.max_n}, {"max_k", L.max_k}, {"max_N", L.max_N}, {"forms", L.forms},
                {"random_orderings", L.random_orderings}, {"terms", L.terms}, {"band", L.band},
                {"scan_samples", L.scan_samples}, {"seed", L.seed}, {"sign_fault", L.sign_fault}};
}

inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix_seed(base);
    for (auto p : parts) h = mix_seed(h ^ p);
    return h;
}

/// Pass/fail counter for one named identity.
struct Tally {
    std::string name;
    size_t run = 0, failed = 0, vacuous = 0;
    json counterexample;  // first failure only
};

class TallyBook {
public:
    explicit TallyBook(std::vector<std::string> names) {
        for (auto& n : names) {
            Tally t;
            t.name = std::move(n);
            t_.push_back(std::move(t));
        }
    }
    Tally& operator[](const std::string& name) {
        for (auto& t : t_)
            if (t.name == name) return t;
        throw std::logic_error("unknown check " + name);
    }
    void record(const std::string& name, bool ok, const std::function<json()>& witness) {
        auto& t = (*this)[name];
        ++t.run;
        if (ok) return;
        ++t.failed;
        if (t.counterexample.is_null()) t.counterexample = witness();
    }
    bool passed() const {
        for (const auto& t : t_)
            if (t.failed) return false;
        return true;
    }
    json to_json() const {
        json a = json::array();
        for (const auto& t : t_) {
            json j{{"check", t.name}, {"run", t.run}, {"failed", t.failed}};
            if (t.vacuous) j["vacuous"] = t.vacuous;
            if (!t.counterexample.is_null()) j["counterexample"] = t.counterexample;
            a.push_back(j);
        }
        return a;
    }

private:
    std::vector<Tally> t_;
};

/// Smallest failing piece of F: tries each single trig term before giving up.
inline Form<TrigPoly> shrink_form(const Form<TrigPoly>& F, const std::function<bool(const Form<TrigPoly>&)>& fails) {
    for (size_t r = 0; r < F.size(); ++r)
        for (const auto& [key, a] : F[r].terms()) {
            Form<TrigPoly> one = F.zero_like();
            one[r].add_term(key.freq, key.phase, a);
            if (fails(one)) return one;
        }
    return F;
}

inline std::vector<Ordering> verify_orderings(int n, int k, int ell, int N, const VerifyLimits& L) {
    std::vector<Ordering> out;
    out.push_back(make_ordering(n, k, ell, N, OrderingKind::lexicographic));
    if (ell == 1) out.push_back(make_ordering(n, k, ell, N, OrderingKind::diagonal));
    for (int i = 0; i < L.random_orderings; ++i)
        out.push_back(random_ordering(n, k, ell, N, derive_seed(L.seed, {0x0bd, std::uint64_t(n), std::uint64_t(k),
                                                                         std::uint64_t(ell), std::uint64_t(i)})));
    return out;
}

namespace detail {

inline json witness(const OperatorSpec& s, int q, const std::string& note, const Form<TrigPoly>* F = nullptr) {
    json j{{"spec", spec_json(s)}, {"ordering", hodc::to_json(s.ordering())}, {"q", q}, {"detail", note}};
    if (F) j["form"] = hodc::to_json(*F);
    return j;
}

inline void verify_spec_exact(const OperatorSpec& s, const VerifyLimits& L, TallyBook& book) {
    const int n = s.n(), N = s.N(), ell = s.ell();
    const auto& oh = s.ordering().hash();
    bool some_nonzero_TT = false, any_applicable_TT = false;
    for (int q = 0; q <= N; ++q) {
        // operator-level checks
        const ComposeReport tt = compose_TT(s, q);
        if (tt.applicable) {
            any_applicable_TT = true;
            if (tt.max_abs_coeff != 0) some_nonzero_TT = true;
            if (ell % 2 == 1)
                book.record("TT_zero_iff_l_odd", tt.max_abs_coeff == 0, [&] {
                    return witness(s, q, "T~T~ has a coefficient of size " + std::to_string(tt.max_abs_coeff));
                });
            else
                book.record("TT_zero_iff_l_odd", tt.factor_holds,
                            [&] { return witness(s, q, "T~T~ is not twice its single-orientation sum"); });
        }
        const CoeffTensor direct = box_coeff_tensor(s, q);
        if (ell == 1) {
            book.record("tensor_kronecker_l1", is_kronecker(direct, s.alphas().size()),
                        [&] { return witness(s, q, "direct-sum tensor is not delta_MI delta_ab"); });
        } else {
            const CoeffTensor closed = box_coeff_closed_form(s, q);
            book.record("tensor_closed_form", closed == direct, [&] {
                json j = witness(s, q, "closed form differs from the direct sum");
                for (const auto& [key, v] : direct.entries)
                    if (closed.at(key[0], key[1], key[2], key[3]) != v) {
                        const auto& labs = labels_of(N, q);
                        j["entry"] = json{{"M", labs[key[0]].idx}, {"I", labs[key[1]].idx},
                                          {"alpha", s.alphas()[key[2]]}, {"beta", s.alphas()[key[3]]},
                                          {"direct", v}, {"closed", closed.at(key[0], key[1], key[2], key[3])}};
                        break;
                    }
                return j;
            });
        }

        // form-level checks
        std::mt19937_64 rng(derive_seed(L.seed, {0xf0, std::uint64_t(q), std::hash<std::string>{}(oh + s.describe())}));
        const int star_sign = parity_sign(static_cast<long>(q) * (N - q));
        for (int f = 0; f < L.forms; ++f) {
            const Form<TrigPoly> F = random_trig_form(n, N, q, rng, L.terms, L.band);
            const Form<TrigPoly> F2 = random_trig_form(n, N, q, rng, L.terms, L.band);

            auto star_fails = [&](const Form<TrigPoly>& X) {
                Form<TrigPoly> Y = X;
                if (star_sign < 0) Y = -Y;
                return !(hodge_star(hodge_star(X)) == Y);
            };
            book.record("star_involution", !star_fails(F),
                        [&] { return witness(s, q, "** != (-1)^{q(N-q)}", &F); });

            book.record("inner_product_wedge", inner_product(F, F2) == inner_product_wedge(F, F2), [&] {
                auto bad = shrink_form(F, [&](const Form<TrigPoly>& X) { return inner_product(X, F2) != inner_product_wedge(X, F2); });
                json j = witness(s, q, "coordinate and wedge pairings differ", &bad);
                j["partner"] = hodc::to_json(F2);
                return j;
            });

            const CoeffTensor& t = direct;
            auto box_fails = [&](const Form<TrigPoly>& X) { return !(box_apply(s, X) == box_contract(s, t, X)); };
            book.record("box_tensor_contraction", !box_fails(F), [&] {
                auto bad = shrink_form(F, box_fails);
                return witness(s, q, "box_apply differs from the tensor contraction", &bad);
            });

            if (q + ell <= N) {
                const Form<TrigPoly> G = random_trig_form(n, N, q + ell, rng, L.terms, L.band);
                const Form<TrigPoly> TsG_a = apply_T_star(s, G);
                const Form<TrigPoly> TsG_b = apply_T_star_coordinate(s, G);
                const auto lhs = inner_product(apply_T(s, F), G);
                auto adj_fails = [&](const Form<TrigPoly>& X) { return inner_product(apply_T(s, X), G) != inner_product(X, TsG_a); };
                book.record("adjoint_hybrid", lhs == inner_product(F, TsG_a) && TsG_a == TsG_b, [&] {
                    if (!(TsG_a == TsG_b)) {
                        auto bad = shrink_form(G, [&](const Form<TrigPoly>& Y) { return !(apply_T_star(s, Y) == apply_T_star_coordinate(s, Y)); });
                        return witness(s, q + ell, "star-conjugated and coordinate adjoints differ", &bad);
                    }
                    auto bad = shrink_form(F, adj_fails);
                    json j = witness(s, q, "<T~F,G> != <F,T~*G>", &bad);
                    j["partner"] = hodc::to_json(G);
                    return j;
                });
                if (ell % 2 == 1 && q + 2 * ell <= N) {
                    auto tt_fails = [&](const Form<TrigPoly>& X) { return !apply_T(s, apply_T(s, X)).is_zero(); };
                    book.record("TT_zero_iff_l_odd", !tt_fails(F), [&] {
                        auto bad = shrink_form(F, tt_fails);
                        return witness(s, q, "T~T~F != 0", &bad);
                    });
                }
            }

            // source operator, when l <= n
            if (ell <= n && q + ell <= n) {
                const Form<TrigPoly> f = random_trig_form(n, n, q, rng, L.terms, L.band);
                const Form<TrigPoly> g = random_trig_form(n, n, q + ell, rng, L.terms, L.band);
                const Form<TrigPoly> a = apply_Top_star(s, g);
                const Form<TrigPoly> b = apply_Top_star_restricted(s, g);
                book.record("adjoint_source", inner_product(apply_Top(s, f), g) == inner_product(f, a) && a == b, [&] {
                    json j = witness(s, q, a == b ? "<Tf,g> != <f,T*g>" : "the two routes to T* differ", &f);
                    j["partner"] = hodc::to_json(g);
                    return j;
                });
            }
        }
    }
    if (ell % 2 == 0) {
        if (!any_applicable_TT) {
            ++book["TT_zero_iff_l_odd"].vacuous;
        } else {
            book.record("TT_zero_iff_l_odd", some_nonzero_TT,
                        [&] { return witness(s, -1, "l even but T~T~ vanishes at every degree"); });
        }
    }
}

}  // namespace detail

inline const std::vector<std::string>& exact_check_names() {
    static const std::vector<std::string> names{"adjoint_hybrid",  "adjoint_source",         "TT_zero_iff_l_odd",
                                                "star_involution", "inner_product_wedge",    "box_tensor_contraction",
                                                "tensor_kronecker_l1", "tensor_closed_form"};
    return names;
}

/// Exact identity suite; returns {"pass", "checks", "specs"}.
inline json verify_exact(const VerifyLimits& L) {
    TallyBook book(exact_check_names());
    json specs = json::array();
    for (int n = 2; n <= L.max_n; ++n)
        for (int k = 1; k <= L.max_k; ++k) {
            const auto inc = admissible_increments(n, k);
            for (const auto& sol : inc.admissible) {
                if (sol.N > L.max_N) continue;
                for (const auto& ord : verify_orderings(n, k, sol.ell, sol.N, L)) {
                    OperatorSpec s(ord, L.sign_fault);
                    detail::verify_spec_exact(s, L, book);
                    specs.push_back(spec_json(s));
                }
            }
        }
    return json{{"pass", book.passed()}, {"checks", book.to_json()}, {"specs", specs}};
}

inline bool on_first_coordinate_hyperplane(const std::vector<mpq_class>& xi) { return !xi.empty() && xi[0] == 0; }

inline bool proportional_to_ones(const std::vector<mpq_class>& xi) {
    for (const auto& x : xi)
        if (x != xi[0]) return false;
    return xi[0] != 0;
}

/// Symbol checks: chained degeneracy, diagonal ellipticity bound, scalar hybrid symbol.
inline json verify_symbol(const VerifyLimits& L) {
    TallyBook book({"chained_vanishes", "diagonal_lower_bound", "diagonal_near_equality", "hybrid_scalar_common"});
    json scans = json::array();
    for (int n = 2; n <= L.max_n; ++n)
        for (int k = 1; k <= L.max_k; ++k) {
            const int N = static_cast<int>(small_binom(n - 1 + k, k));
            if (N > L.max_N) continue;
            const double bound = std::pow(static_cast<double>(n), 1.0 - k);
            for (int q = 0; q <= n; ++q) {
                if (k >= 2) {
                    OperatorSpec sc(make_ordering(n, k, 1, N, OrderingKind::chained), L.sign_fault);
                    ScanResult r = ellipticity_scan(sc, q, L.scan_samples, true);
                    bool ok = r.min_quotient == 0.0 && on_first_coordinate_hyperplane(r.argmin);
                    if (r.exact) ok = ok && r.exact_min == 0;
                    scans.push_back(json{{"spec", spec_json(sc)}, {"q", q}, {"source", true}, {"min", r.min_quotient},
                                         {"argmin", to_strings(r.argmin)}, {"exact", r.exact}});
                    book.record("chained_vanishes", ok, [&] {
                        return json{{"spec", spec_json(sc)}, {"q", q}, {"min", r.min_quotient}, {"argmin", to_strings(r.argmin)}};
                    });
                }
                OperatorSpec sd(make_ordering(n, k, 1, N, OrderingKind::diagonal), L.sign_fault);
                ScanResult r = ellipticity_scan(sd, q, L.scan_samples, true);
                scans.push_back(json{{"spec", spec_json(sd)}, {"q", q}, {"source", true}, {"min", r.min_quotient},
                                     {"argmin", to_strings(r.argmin)}, {"exact", r.exact}});
                book.record("diagonal_lower_bound", r.min_quotient >= bound - 1e-12, [&] {
                    return json{{"spec", spec_json(sd)}, {"q", q}, {"min", r.min_quotient}, {"bound", bound},
                                {"argmin", to_strings(r.argmin)}};
                });
                // the value at (1,...,1)
                std::vector<mpq_class> ones(static_cast<size_t>(n), mpq_class(1));
                mpq_class den = pow_q(norm_sq(ones), k);
                double at_ones;
                {
                    auto Q = box_symbol(sd, q, ones, true);
                    Poly p;
                    if (scalar_symbol(box_symbol_poly(sd, q, true), &p)) {
                        at_ones = mpq_class(p.eval(ones) / den).get_d();
                    } else {
                        at_ones = mpq_class(Q[0][0] / den).get_d();
                        for (size_t i = 0; i < Q.size(); ++i) at_ones = std::min(at_ones, mpq_class(Q[i][i] / den).get_d());
                    }
                }
                book.record("diagonal_near_equality",
                            std::abs(at_ones - bound) <= 1e-6 && std::abs(r.min_quotient - bound) <= 1e-6 &&
                                (proportional_to_ones(r.argmin) || std::abs(r.min_quotient - at_ones) <= 1e-12),
                            [&] {
                                return json{{"spec", spec_json(sd)}, {"q", q}, {"value_at_ones", at_ones}, {"bound", bound},
                                            {"min", r.min_quotient}, {"argmin", to_strings(r.argmin)}};
                            });
            }
            // hybrid symbol across orderings
            std::vector<Ordering> ords{make_ordering(n, k, 1, N, OrderingKind::lexicographic),
                                       make_ordering(n, k, 1, N, OrderingKind::diagonal)};
            if (k >= 2) ords.push_back(make_ordering(n, k, 1, N, OrderingKind::chained));
            for (int i = 0; i < L.random_orderings; ++i)
                ords.push_back(random_ordering(n, k, 1, N, derive_seed(L.seed, {0x5b, std::uint64_t(n), std::uint64_t(k), std::uint64_t(i)})));
            for (int q = 0; q <= N; ++q) {
                Poly ref;
                bool have_ref = false;
                for (const auto& o : ords) {
                    OperatorSpec s(o, L.sign_fault);
                    Poly p;
                    const bool scalar = scalar_symbol(box_symbol_poly(s, q, false), &p);
                    const bool ok = scalar && (!have_ref || p == ref);
                    book.record("hybrid_scalar_common", ok, [&] {
                        return json{{"spec", spec_json(s)}, {"q", q}, {"scalar", scalar}, {"symbol", scalar ? p.str() : ""},
                                    {"reference", have_ref ? ref.str() : ""}};
                    });
                    if (scalar && !have_ref) {
                        ref = p;
                        have_ref = true;
                    }
                }
            }
        }
    return json{{"pass", book.passed()}, {"checks", book.to_json()}, {"scans", scans}};
}

}  // namespace hodc
