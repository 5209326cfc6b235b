#pragma once

// JSON encodings for orderings, forms, coefficient tensors and symbols.

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <json.hpp>

#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "operators.hpp"
#include "symbol.hpp"

namespace hodc {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "hodc 1.0.0";
inline constexpr int kReportSchema = 1;

// ---- base64 -------------------------------------------------------------------

inline std::string base64_encode(const std::string& bytes) {
    using namespace boost::archive::iterators;
    using It = base64_from_binary<transform_width<std::string::const_iterator, 6, 8>>;
    std::string out(It(bytes.begin()), It(bytes.end()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

inline std::string base64_decode(std::string text) {
    using namespace boost::archive::iterators;
    using It = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
    size_t pad = 0;
    while (!text.empty() && text.back() == '=') {
        text.pop_back();
        ++pad;
    }
    std::string out(It(text.begin()), It(text.end()));
    return out;
}

inline std::string encode_doubles(const std::vector<double>& v) {
    std::string bytes(v.size() * sizeof(double), '\0');
    if (!v.empty()) std::memcpy(bytes.data(), v.data(), bytes.size());
    return base64_encode(bytes);
}

inline std::vector<double> decode_doubles(const std::string& text) {
    std::string bytes = base64_decode(text);
    if (bytes.size() % sizeof(double) != 0) throw std::invalid_argument("sample array has a bad length");
    std::vector<double> v(bytes.size() / sizeof(double));
    if (!v.empty()) std::memcpy(v.data(), bytes.data(), bytes.size());
    return v;
}

// ---- orderings ------------------------------------------------------------------

inline json to_json(const Ordering& o) {
    json pairs = json::array();
    for (size_t a = 0; a < o.size(); ++a) pairs.push_back(json::array({o.multiindex(a).exps, o.label_of(a).idx}));
    return json{{"n", o.n()}, {"k", o.k()}, {"l", o.ell()}, {"N", o.N()}, {"kind", to_string(o.kind())},
                {"hash", o.hash()}, {"table", pairs}};
}

inline Ordering ordering_from_json(const json& j) {
    const int n = j.at("n"), k = j.at("k"), ell = j.at("l"), N = j.at("N");
    const auto dom = enum_multiindices(n, k);
    std::vector<int> table(dom.size(), -1);
    if (j.at("table").size() != dom.size()) throw std::invalid_argument("ordering table has the wrong length");
    for (const auto& pr : j.at("table")) {
        MultiIndex a(pr.at(0).get<std::vector<int>>());
        Label L(pr.at(1).get<std::vector<int>>());
        if (a.dim() != n || a.order() != k) throw std::invalid_argument("ordering table: bad multi-index " + a.str());
        if (L.size() != ell || L.max_index() > N) throw std::invalid_argument("ordering table: bad label " + L.str());
        auto it = std::find(dom.begin(), dom.end(), a);
        size_t pos = static_cast<size_t>(it - dom.begin());
        if (table[pos] != -1) throw std::invalid_argument("ordering table: repeated multi-index " + a.str());
        table[pos] = static_cast<int>(label_rank(L, N));
    }
    OrderingKind kind = OrderingKind::custom;
    if (j.contains("kind")) kind = ordering_kind_from_string(j.at("kind").get<std::string>());
    Ordering o(n, k, ell, N, kind, std::move(table));
    // a named kind must really be that ordering
    if (kind != OrderingKind::custom && !(make_ordering(n, k, ell, N, kind) == o))
        return Ordering(n, k, ell, N, OrderingKind::custom, o.table());
    return o;
}

// ---- forms ----------------------------------------------------------------------

inline json coeff_to_json(const TrigPoly& p) {
    json terms = json::array();
    for (const auto& [k, a] : p.terms()) terms.push_back(json{{"w", k.freq}, {"phase", k.phase == Phase::cos ? "cos" : "sin"}, {"a", a.get_str()}});
    return terms;
}

inline json coeff_to_json(const GridField& g) { return encode_doubles(g.samples()); }

inline json coeff_to_json(const BumpSeries& b) {
    json terms = json::array();
    for (const auto& [k, a] : b.terms())
        terms.push_back(json{{"center", k.center}, {"sigma", k.sigma}, {"gamma", k.gamma}, {"a", a}});
    return terms;
}

template <class C>
json to_json(const Form<C>& F) {
    json comps = json::array();
    for (size_t r = 0; r < F.size(); ++r) {
        if (F[r].is_zero()) continue;
        comps.push_back(json{{"label", F.label(r).idx}, {"coeff", coeff_to_json(F[r])}});
    }
    json j{{"backend", coeff_traits<C>::name}, {"n", F.n()}, {"N", F.N()}, {"q", F.q()}};
    if constexpr (std::is_same_v<C, GridField>) j["P"] = F.zero_coeff().resolution();
    j["components"] = comps;
    return j;
}

inline TrigPoly trig_from_json(int n, const json& terms) {
    TrigPoly p(n);
    for (const auto& t : terms) {
        mpq_class a(t.at("a").get<std::string>());
        a.canonicalize();
        const std::string ph = t.at("phase");
        if (ph != "cos" && ph != "sin") throw std::invalid_argument("trig term phase must be cos or sin");
        p.add_term(t.at("w").get<std::vector<int>>(), ph == "cos" ? Phase::cos : Phase::sin, a);
    }
    return p;
}

template <class C>
Form<C> form_from_json(const json& j) {
    if (j.at("backend").get<std::string>() != coeff_traits<C>::name) throw std::invalid_argument("form backend mismatch");
    const int n = j.at("n"), N = j.at("N"), q = j.at("q");
    C proto;
    if constexpr (std::is_same_v<C, TrigPoly>) proto = TrigPoly(n);
    else if constexpr (std::is_same_v<C, GridField>) proto = GridField(n, j.at("P").get<int>());
    else proto = BumpSeries(n);
    Form<C> F(n, N, q, proto);
    for (const auto& c : j.at("components")) {
        Label L(c.at("label").get<std::vector<int>>());
        if constexpr (std::is_same_v<C, TrigPoly>) {
            F.at(L) = trig_from_json(n, c.at("coeff"));
        } else if constexpr (std::is_same_v<C, GridField>) {
            F.at(L) = GridField(n, proto.resolution(), decode_doubles(c.at("coeff").get<std::string>()));
        } else {
            BumpSeries b(n);
            for (const auto& t : c.at("coeff"))
                b.add_bump(t.at("center"), t.at("sigma"), t.at("gamma"), t.at("a").get<double>());
            F.at(L) = b;
        }
    }
    return F;
}

// ---- tensors and symbols ------------------------------------------------------------

inline json to_json(const OperatorSpec& s, const CoeffTensor& t) {
    const auto& labs = labels_of(s.N(), t.q);
    const auto& dom = s.ordering().multiindices();
    json entries = json::array();
    for (const auto& [key, v] : t.entries)
        entries.push_back(json{{"M", labs[key[0]].idx}, {"I", labs[key[1]].idx}, {"alpha", dom[key[2]].exps},
                               {"beta", dom[key[3]].exps}, {"value", v}});
    return json{{"q", t.q}, {"N", t.N}, {"nonzero", t.entries.size()}, {"entries", entries}};
}

inline json spec_json(const OperatorSpec& s) {
    return json{{"n", s.n()}, {"k", s.k()}, {"l", s.ell()}, {"N", s.N()}, {"ordering", to_string(s.ordering().kind())},
                {"ordering_hash", s.ordering().hash()}};
}

inline json rational_vector(const std::vector<mpq_class>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

inline json poly_to_json(const Poly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms) terms.push_back(json{{"exponents", e}, {"coeff", c.get_str()}});
    return json{{"text", p.str()}, {"terms", terms}};
}

}  // namespace hodc
