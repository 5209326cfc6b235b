#pragma once

// Config-driven sweep of the inequality probes and Hodge solves.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "inequalities.hpp"
#include "io.hpp"
#include "verify.hpp"

namespace hodc {

/// Worker count from HODC_THREADS (default 1).
inline unsigned thread_count() {
    const char* v = std::getenv("HODC_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    long t = std::strtol(v, &end, 10);
    if (end == v || t < 1) return 1;
    return static_cast<unsigned>(std::min<long>(t, 64));
}

/// Runs fn(i) for i in [0, count); results land in caller-owned slots.
template <class Fn>
void parallel_for(size_t count, Fn&& fn) {
    const unsigned T = std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<size_t>(count, 1)));
    if (T <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < T; ++t)
        pool.emplace_back([&] {
            for (size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

inline json default_suite_config() {
    json specs = json::array();
    for (auto [n, k] : {std::pair{2, 1}, {2, 2}, {3, 1}, {3, 2}})
        specs.push_back(json{{"n", n}, {"k", k}, {"l", 1}, {"ordering", "diagonal"}});
    return json{{"schema", kReportSchema},
                {"seed", 20240601},
                {"specs", specs},
                {"duality", {{"cases", 50}, {"P", {64, 128}}, {"dilations", {0.5, 2.0}}, {"P_dilation", 128}}},
                {"gn", {{"cases", 50}, {"P", {64, 128}}, {"dilations", {0.5, 2.0}}, {"P_dilation", 128}}},
                {"hodge", {{"q", 1}, {"P", {32, 64}}, {"terms", 12}, {"band", 24}}},
                {"classical", {{"n", {2, 3}}, {"sigma", 0.35}, {"P", 128}}}};
}

namespace detail {

struct ProbeConfig {
    int cases = 0;
    std::vector<int> P;
    std::vector<double> dilations;
    int P_dilation = 0;
};

inline ProbeConfig probe_config(const json& j) {
    ProbeConfig c;
    c.cases = j.value("cases", 0);
    c.P = j.value("P", std::vector<int>{64, 128});
    c.dilations = j.value("dilations", std::vector<double>{});
    c.P_dilation = j.value("P_dilation", c.P.empty() ? 128 : c.P.back());
    if (c.cases < 0) throw std::invalid_argument("suite config: cases must be >= 0");
    if (c.P.empty()) throw std::invalid_argument("suite config: need at least one grid size");
    return c;
}

inline json probe_json(const ProbeConfig& c) {
    return json{{"cases", c.cases}, {"P", c.P}, {"dilations", c.dilations}, {"P_dilation", c.P_dilation}};
}

/// One probed case: ratios keyed "P<size>" and "dil<lambda>".
struct CaseRecord {
    int q = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> ratios;
    std::string error;
};

inline std::string dil_key(double lam) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "dil%g", lam);
    return buf;
}

inline json aggregate(const std::vector<CaseRecord>& recs, const ProbeConfig& c) {
    json cases = json::array();
    std::map<std::string, double> mx;
    size_t errors = 0;
    for (const auto& r : recs) {
        json j{{"q", r.q}, {"seed", r.seed}};
        if (!r.error.empty()) {
            j["error"] = r.error;
            ++errors;
        } else {
            for (const auto& [k, v] : r.ratios) {
                j[k] = v;
                mx[k] = std::max(mx.count(k) ? mx[k] : 0.0, v);
            }
        }
        cases.push_back(j);
    }
    json maxima = json::object();
    for (const auto& [k, v] : mx) maxima[k] = v;
    json out{{"cases", cases}, {"errors", errors}, {"max", maxima}};
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
    if (c.P.size() >= 2) {
        const std::string lo = "P" + std::to_string(c.P[c.P.size() - 2]), hi = "P" + std::to_string(c.P.back());
        if (mx.count(lo) && mx.count(hi)) out["refinement_delta"] = rel(mx[lo], mx[hi]);
    }
    if (!c.dilations.empty()) {
        const std::string base = "Pdil" + std::to_string(c.P_dilation);
        double worst = 0;
        bool any = false;
        for (double lam : c.dilations)
            if (mx.count(base) && mx.count(dil_key(lam))) {
                worst = std::max(worst, rel(mx[base], mx[dil_key(lam)]));
                any = true;
            }
        if (any) out["dilation_delta"] = worst;
    }
    return out;
}

/// Ratio for grid size P (dilation 1) and for each dilation at P_dilation.
template <class Eval>
void probe_case(CaseRecord& rec, const ProbeConfig& c, bool same_norm, Eval&& eval) {
    try {
        for (int P : c.P) rec.ratios.emplace_back("P" + std::to_string(P), eval(P, 1.0, false));
        if (!c.dilations.empty()) {
            double base = 0;
            bool found = false;
            if (same_norm)
                for (const auto& [k, v] : rec.ratios)
                    if (k == "P" + std::to_string(c.P_dilation)) {
                        base = v;
                        found = true;
                    }
            rec.ratios.emplace_back("Pdil" + std::to_string(c.P_dilation), found ? base : eval(c.P_dilation, 1.0, true));
            for (double lam : c.dilations) rec.ratios.emplace_back(dil_key(lam), eval(c.P_dilation, lam, true));
        }
    } catch (const std::exception& e) {
        rec.ratios.clear();
        rec.error = e.what();
    }
}

inline json duality_probe(const OperatorSpec& s, const ProbeConfig& c, std::uint64_t seed) {
    std::vector<CaseRecord> recs(static_cast<size_t>(c.cases));
    parallel_for(recs.size(), [&](size_t i) {
        auto& rec = recs[i];
        rec.seed = derive_seed(seed, {0xd0, i});
        std::mt19937_64 rng(rec.seed);
        rec.q = 1 + static_cast<int>(i % static_cast<size_t>(std::max(1, s.N() - 1)));
        if (rec.q >= s.N()) rec.q = s.N() - 1;
        try {
            const auto Phi = random_bump_form(s.n(), s.N(), rec.q - s.ell(), rng);
            const auto F = apply_T(s, Phi);
            const auto H = random_bump_form(s.n(), s.N(), rec.q, rng);
            probe_case(rec, c, true, [&](int P, double lam, bool) {
                if (lam == 1.0) return duality_ratio(s, F, H, P).ratio;
                return duality_ratio(s, dilate_form(F, lam), dilate_form(H, lam), P).ratio;
            });
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    return aggregate(recs, c);
}

/// Refinement uses the full W^{k-1,r} norm; dilation uses its top-order part.
inline json gn_probe(const OperatorSpec& s, const ProbeConfig& c, std::uint64_t seed) {
    std::vector<CaseRecord> recs(static_cast<size_t>(c.cases));
    parallel_for(recs.size(), [&](size_t i) {
        auto& rec = recs[i];
        rec.seed = derive_seed(seed, {0x6a, i});
        std::mt19937_64 rng(rec.seed);
        rec.q = (i % 2 == 0) ? 0 : s.n();
        try {
            const auto u = random_bump_form(s.n(), s.n(), rec.q, rng);
            probe_case(rec, c, false, [&](int P, double lam, bool dil) {
                GnOptions o;
                o.homogeneous = dil;
                if (lam == 1.0) return gn_ratio(s, u, P, o).ratio;
                return gn_ratio(s, dilate_form(u, lam), P, o).ratio;
            });
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    json out = aggregate(recs, c);
    out["dilation_norm"] = "homogeneous";
    return out;
}

/// Band-limited random form with amplitudes decaying like exp(-|w|/4).
inline Form<TrigPoly> band_limited_form(int n, int N, int q, std::mt19937_64& rng, int terms, int band) {
    Form<TrigPoly> F(n, N, q, TrigPoly(n));
    std::uniform_int_distribution<int> wd(-band, band);
    std::uniform_int_distribution<int> num(-64, 64);
    std::bernoulli_distribution ph(0.5);
    for (size_t r = 0; r < F.size(); ++r)
        for (int t = 0; t < terms; ++t) {
            std::vector<int> w(static_cast<size_t>(n));
            double norm = 0;
            for (auto& x : w) {
                x = wd(rng);
                norm += x * x;
            }
            if (norm == 0) continue;
            mpq_class a(std::exp(-std::sqrt(norm) / 4.0));
            a *= mpq_class(num(rng), 64);
            F[r].add_term(w, ph(rng) ? Phase::cos : Phase::sin, a);
        }
    return F;
}

inline Form<GridField> sample_form(const Form<TrigPoly>& F, int P) { return to_grid(F, P); }

}  // namespace detail

struct HodgeStudy {
    std::vector<int> P;
    std::vector<double> residual_T, residual_Tstar;
    std::string error;
};

/// F = T~Phi and G = T~*Psi, band-limited, solved at each grid size.
inline HodgeStudy hodge_study(const OperatorSpec& s, int q, const std::vector<int>& Ps, std::uint64_t seed, int terms = 12,
                              int band = 24) {
    HodgeStudy st;
    st.P = Ps;
    try {
        std::mt19937_64 rng(seed);
        std::optional<Form<TrigPoly>> F, G;
        if (q + s.ell() <= s.N()) F = apply_T(s, detail::band_limited_form(s.n(), s.N(), q, rng, terms, band));
        if (q >= s.ell()) G = apply_T_star(s, detail::band_limited_form(s.n(), s.N(), q, rng, terms, band));
        for (int P : Ps) {
            std::optional<Form<GridField>> Fg, Gg;
            if (F) Fg = to_grid(*F, P);
            if (G) Gg = to_grid(*G, P);
            HodgeOptions o;
            o.check = P / 2 > band;  // coarser grids alias the data
            auto r = hodge_solve(s, q, Fg, Gg, o);
            st.residual_T.push_back(r.residual_T);
            st.residual_Tstar.push_back(r.residual_Tstar);
        }
    } catch (const std::exception& e) {
        st.error = e.what();
    }
    return st;
}

inline json to_json(const HodgeStudy& h) {
    json j{{"P", h.P}, {"residual_T", h.residual_T}, {"residual_Tstar", h.residual_Tstar}};
    if (!h.error.empty()) j["error"] = h.error;
    return j;
}

/// Deterministic report for a suite config; per-case failures are recorded, not thrown.
inline json run_suite(const json& config) {
    json report{{"schema", kReportSchema}, {"version", kVersion}};
    const std::uint64_t seed = config.value("seed", std::uint64_t{0});
    json resolved{{"seed", seed}};
    json specs_out = json::array();
    const json specs = config.value("specs", json::array());
    const bool has_d = config.contains("duality"), has_g = config.contains("gn"), has_h = config.contains("hodge");
    detail::ProbeConfig dc, gc;
    if (has_d) dc = detail::probe_config(config["duality"]);
    if (has_g) gc = detail::probe_config(config["gn"]);
    int hq = 1, hterms = 12, hband = 24;
    std::vector<int> hP{32, 64};
    if (has_h) {
        hq = config["hodge"].value("q", 1);
        hP = config["hodge"].value("P", hP);
        hterms = config["hodge"].value("terms", hterms);
        hband = config["hodge"].value("band", hband);
    }
    resolved["specs"] = specs;
    if (has_d) resolved["duality"] = detail::probe_json(dc);
    if (has_g) resolved["gn"] = detail::probe_json(gc);
    if (has_h) resolved["hodge"] = json{{"q", hq}, {"P", hP}, {"terms", hterms}, {"band", hband}};

    bool pass = true;
    for (size_t si = 0; si < specs.size(); ++si) {
        const json& sj = specs[si];
        json rec{{"request", sj}};
        try {
            const int n = sj.at("n"), k = sj.at("k"), ell = sj.value("l", 1);
            int N = sj.value("N", 0);
            if (N == 0) {
                for (const auto& sol : admissible_increments(n, k).admissible)
                    if (sol.ell == ell) N = sol.N;
                if (N == 0) throw std::invalid_argument("no admissible N for this l");
            }
            const auto kind = ordering_kind_from_string(sj.value("ordering", std::string("lexicographic")));
            const OperatorSpec s = kind == OrderingKind::custom ? OperatorSpec(ordering_from_json(sj.at("table")))
                                                                : OperatorSpec(make_ordering(n, k, ell, N, kind));
            rec["spec"] = spec_json(s);
            const std::uint64_t sseed = derive_seed(seed, {si, std::uint64_t(n), std::uint64_t(k), std::uint64_t(ell)});
            rec["seed"] = sseed;
            if (has_d) {
                rec["duality"] = detail::duality_probe(s, dc, sseed);
                if (rec["duality"]["errors"].get<size_t>() > 0) pass = false;
            }
            if (has_g) {
                rec["gn"] = detail::gn_probe(s, gc, sseed);
                if (rec["gn"]["errors"].get<size_t>() > 0) pass = false;
            }
            if (has_h && ell == 1) {
                auto h = hodge_study(s, hq, hP, derive_seed(sseed, {0x40d6e}), hterms, hband);
                rec["hodge"] = to_json(h);
                if (!h.error.empty()) pass = false;
            }
        } catch (const std::exception& e) {
            rec["error"] = e.what();
            pass = false;
        }
        specs_out.push_back(rec);
    }

    json classical = json::array();
    if (config.contains("classical")) {
        const auto& cj = config["classical"];
        const double sigma = cj.value("sigma", 0.35);
        const int P = cj.value("P", 128);
        const auto ns = cj.value("n", std::vector<int>{2, 3});
        resolved["classical"] = json{{"n", ns}, {"sigma", sigma}, {"P", P}};
        for (int n : ns) {
            json c{{"n", n}, {"sigma", sigma}, {"P", P}};
            try {
                OperatorSpec s(make_ordering(n, 1, 1, n, OrderingKind::lexicographic));
                const double num = gn_ratio(s, radial_gaussian(n, sigma), P).ratio;
                const double ref = gaussian_gn_ratio(n, sigma);
                c["ratio"] = num;
                c["closed_form"] = ref;
                c["rel_error"] = std::abs(num - ref) / ref;
            } catch (const std::exception& e) {
                c["error"] = e.what();
                pass = false;
            }
            classical.push_back(c);
        }
    }
    report["config"] = resolved;
    report["specs"] = specs_out;
    if (!classical.empty()) report["classical"] = classical;
    report["completed"] = pass;
    return report;
}

}  // namespace hodc
