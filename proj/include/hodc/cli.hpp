#pragma once

// Command-line front end: increments, laplacian, symbol, verify, ineq.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "suite.hpp"
#include "verify.hpp"

namespace hodc {

namespace detail {

inline std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline void render_text(const json& j, std::ostream& os, int indent) {
    const std::string pad(static_cast<size_t>(indent), ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (v.is_structured() && !v.empty()) {
                os << pad << k << ":\n";
                render_text(v, os, indent + 2);
            } else {
                os << pad << k << ": " << scalar_text(v) << "\n";
            }
        }
    } else if (j.is_array()) {
        bool flat = std::all_of(j.begin(), j.end(), [](const json& v) { return !v.is_structured(); });
        if (flat) {
            os << pad << j.dump() << "\n";
            return;
        }
        for (const auto& v : j) {
            if (v.is_structured()) {
                os << pad << "-\n";
                render_text(v, os, indent + 2);
            } else {
                os << pad << "- " << scalar_text(v) << "\n";
            }
        }
    } else {
        os << pad << scalar_text(j) << "\n";
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c;
    }
    return o + "\"";
}

inline void render_csv(const json& j, const std::string& path, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_csv(v, path.empty() ? k : path + "." + k, os);
    } else if (j.is_array() && std::any_of(j.begin(), j.end(), [](const json& v) { return v.is_structured(); })) {
        for (size_t i = 0; i < j.size(); ++i) render_csv(j[i], path + "[" + std::to_string(i) + "]", os);
    } else {
        os << csv_field(path) << "," << csv_field(j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

}  // namespace detail

/// Text and CSV are both rendered from the JSON document.
inline std::string render(const json& doc, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        os << doc.dump(2) << "\n";
    } else if (format == "text") {
        detail::render_text(doc, os, 0);
    } else {
        os << "path,value\n";
        detail::render_csv(doc, "", os);
    }
    return os.str();
}

inline int find_N(int n, int k, int ell) {
    for (const auto& s : admissible_increments(n, k).admissible)
        if (s.ell == ell) return static_cast<int>(s.N);
    throw std::invalid_argument("l = " + std::to_string(ell) + " is not an admissible increment for (n,k) = (" +
                                std::to_string(n) + "," + std::to_string(k) + ")");
}

inline Ordering resolve_ordering(int n, int k, int ell, int N, const std::string& name, std::uint64_t seed) {
    if (name == "random") return random_ordering(n, k, ell, N, seed);
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
        std::ifstream in(name);
        if (!in) throw std::invalid_argument("cannot open ordering file " + name);
        Ordering o = ordering_from_json(json::parse(in));
        if (o.n() != n || o.k() != k || o.ell() != ell || o.N() != N)
            throw std::invalid_argument("ordering file does not match the requested spec");
        return o;
    }
    return make_ordering(n, k, ell, N, ordering_kind_from_string(name));
}

inline json increments_json(int n, int k) {
    const auto r = admissible_increments(n, k);
    json rows = json::array(), rej = json::array();
    for (const auto& s : r.admissible) rows.push_back(json{{"l", s.ell}, {"N", s.N}});
    for (const auto& s : r.rejected_by_dimension) rej.push_back(json{{"l", s.ell}, {"N", s.N}});
    return json{{"n", n}, {"k", k}, {"m", r.m.get_str()}, {"admissible", rows}, {"rejected_by_dimension", rej}};
}

inline json laplacian_json(const OperatorSpec& s, int q) {
    if (q < 0 || q > s.N()) throw std::invalid_argument("degree q out of range");
    const CoeffTensor t = box_coeff_tensor(s, q);
    json j{{"spec", spec_json(s)}, {"ordering", to_json(s.ordering())}, {"q", q}};
    j["kronecker"] = is_kronecker(t, s.alphas().size());
    if (s.ell() >= 2) j["closed_form_matches"] = box_coeff_closed_form(s, q) == t;
    j["sign"] = s.k() % 2 == 0 ? 1 : -1;
    j["tensor"] = to_json(s, t);
    return j;
}

inline json symbol_json(const OperatorSpec& s, int q, bool source, int samples) {
    const PolyMatrix S = box_symbol_poly(s, q, source);
    json j{{"spec", spec_json(s)}, {"q", q}, {"source", source}};
    Poly p;
    if (scalar_symbol(S, &p)) {
        j["scalar"] = true;
        j["symbol"] = poly_to_json(p);
    } else {
        j["scalar"] = false;
        json rows = json::array();
        for (const auto& row : S) {
            json r = json::array();
            for (const auto& e : row) r.push_back(e.str());
            rows.push_back(r);
        }
        j["symbol"] = rows;
    }
    const ScanResult r = ellipticity_scan(s, q, samples, source);
    json scan{{"directions", r.evaluated}, {"min_quotient", r.min_quotient}, {"argmin", to_strings(r.argmin)}, {"exact", r.exact}};
    if (r.exact) scan["min_quotient_exact"] = r.exact_min.get_str();
    j["scan"] = scan;
    // the direction (0,1,...,1)
    std::vector<mpq_class> probe(static_cast<size_t>(s.n()), mpq_class(1));
    probe[0] = 0;
    const QMatrix Q = eval_matrix(S, probe);
    bool vanishes = true;
    for (const auto& row : Q)
        for (const auto& x : row)
            if (x != 0) vanishes = false;
    j["probe"] = json{{"xi", to_strings(probe)}, {"vanishes", vanishes}};
    return j;
}

/// Entry point; returns the process exit code.
inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid differential operators: enumeration, exact checks, symbols and inequality probes"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 1;
    std::string out_path, format = "json";
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--format", format, "json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}))->capture_default_str();

    int n = 0, k = 0, ell = 1, q = 0;
    auto* inc = app.add_subcommand("increments", "admissible degree increments for (n,k)");
    inc->add_option("n", n)->required();
    inc->add_option("k", k)->required();

    std::string ordering = "lexicographic";
    auto* lap = app.add_subcommand("laplacian", "coefficient tensor of the Hodge Laplacian");
    lap->add_option("n", n)->required();
    lap->add_option("k", k)->required();
    lap->add_option("l", ell)->required();
    lap->add_option("q", q)->required();
    lap->add_option("--ordering", ordering, "lexicographic, diagonal, chained, random or a JSON file")->capture_default_str();

    bool source = false;
    int samples = 256;
    auto* sym = app.add_subcommand("symbol", "symbol of the Hodge Laplacian and an ellipticity scan");
    sym->add_option("n", n)->required();
    sym->add_option("k", k)->required();
    sym->add_option("l", ell)->required();
    sym->add_option("q", q)->required();
    sym->add_option("--ordering", ordering)->capture_default_str();
    sym->add_flag("--source", source, "use the operator on R^n instead of the hybrid one");
    sym->add_option("--samples", samples, "scan directions beyond the fixed ones")->capture_default_str();

    std::string scope = "all";
    VerifyLimits lim;
    auto* ver = app.add_subcommand("verify", "exact identity and symbol suites");
    ver->add_option("--scope", scope)->check(CLI::IsMember({"exact", "symbol", "all"}))->capture_default_str();
    ver->add_option("--max-n", lim.max_n)->capture_default_str();
    ver->add_option("--max-k", lim.max_k)->capture_default_str();
    ver->add_option("--max-N", lim.max_N)->capture_default_str();
    ver->add_option("--forms", lim.forms, "random forms per spec, ordering and degree")->capture_default_str();
    ver->add_option("--random-orderings", lim.random_orderings)->capture_default_str();
    ver->add_option("--samples", lim.scan_samples)->capture_default_str();
    ver->add_flag("--inject-sign-fault", lim.sign_fault)->group("");

    std::string config_path;
    auto* ineq = app.add_subcommand("ineq", "duality and Gagliardo-Nirenberg probes, Hodge solves");
    ineq->add_option("--config", config_path, "suite config (JSON); the built-in default otherwise");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    json doc{{"version", kVersion}};
    int code = 0;
    try {
        if (*inc) {
            doc["command"] = "increments";
            doc["config"] = json{{"n", n}, {"k", k}, {"seed", seed}};
            doc["result"] = increments_json(n, k);
        } else if (*lap || *sym) {
            const int N = find_N(n, k, ell);
            OperatorSpec s(resolve_ordering(n, k, ell, N, ordering, seed));
            doc["command"] = *lap ? "laplacian" : "symbol";
            json cfg{{"n", n}, {"k", k}, {"l", ell}, {"N", N}, {"q", q}, {"ordering", ordering}, {"seed", seed}};
            if (*sym) {
                cfg["source"] = source;
                cfg["samples"] = samples;
            }
            doc["config"] = cfg;
            doc["result"] = *lap ? laplacian_json(s, q) : symbol_json(s, q, source, samples);
        } else if (*ver) {
            lim.seed = seed;
            doc["command"] = "verify";
            json cfg = limits_json(lim);
            cfg["scope"] = scope;
            doc["config"] = cfg;
            json res;
            bool pass = true;
            if (scope != "symbol") {
                res["exact"] = verify_exact(lim);
                pass = pass && res["exact"]["pass"].get<bool>();
            }
            if (scope != "exact") {
                res["symbol"] = verify_symbol(lim);
                pass = pass && res["symbol"]["pass"].get<bool>();
            }
            res["pass"] = pass;
            doc["result"] = res;
            if (!pass) code = 1;
        } else if (*ineq) {
            json cfg = default_suite_config();
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw std::invalid_argument("cannot open config " + config_path);
                cfg = json::parse(in);
            }
            if (app.count("--seed")) cfg["seed"] = seed;
            doc["command"] = "ineq";
            doc["config"] = cfg;
            doc["result"] = run_suite(cfg);
            if (!doc["result"]["completed"].get<bool>()) code = 1;
        }
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string text = render(doc, format);
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << out_path << "\n";
            return 2;
        }
        f << text;
    }
    return code;
}

}  // namespace hodc
