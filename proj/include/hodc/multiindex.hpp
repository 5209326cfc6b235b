#pragma once

// Multi-indices, labels, permutation signs and the orderings that pair
// k-th order derivatives with degree-l labels.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hodc {

/// Exponent vector alpha with |alpha| = order().
struct MultiIndex {
    std::vector<int> exps;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : exps(std::move(e)) {
        for (int v : exps)
            if (v < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    }

    int dim() const { return static_cast<int>(exps.size()); }
    int order() const { return std::accumulate(exps.begin(), exps.end(), 0); }
    int operator[](int t) const { return exps[static_cast<size_t>(t)]; }

    /// True when every nonzero exponent sits in the first n slots.
    bool supported_in(int n) const {
        for (int t = n; t < dim(); ++t)
            if (exps[static_cast<size_t>(t)] != 0) return false;
        return true;
    }

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
        MultiIndex r = a;
        for (size_t t = 0; t < r.exps.size(); ++t) r.exps[t] += b.exps[t];
        return r;
    }

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << '(';
        for (size_t t = 0; t < exps.size(); ++t) os << (t ? "," : "") << exps[t];
        os << ')';
        return os.str();
    }
};

inline MultiIndex unit_multiindex(int n, int j, int power = 1) {
    std::vector<int> e(static_cast<size_t>(n), 0);
    e[static_cast<size_t>(j)] = power;
    return MultiIndex(std::move(e));
}

/// Strictly increasing tuple of 1-based indices.
struct Label {
    std::vector<int> idx;

    Label() = default;
    explicit Label(std::vector<int> v) : idx(std::move(v)) {
        for (size_t t = 0; t < idx.size(); ++t) {
            if (idx[t] < 1) throw std::invalid_argument("Label: indices are 1-based");
            if (t && idx[t - 1] >= idx[t]) throw std::invalid_argument("Label: indices must increase strictly");
        }
    }

    int size() const { return static_cast<int>(idx.size()); }
    bool empty() const { return idx.empty(); }
    bool contains(int i) const { return std::binary_search(idx.begin(), idx.end(), i); }
    int max_index() const { return idx.empty() ? 0 : idx.back(); }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (int i : idx) m |= std::uint64_t{1} << (i - 1);
        return m;
    }

    auto operator<=>(const Label&) const = default;
    bool operator==(const Label&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << '(';
        for (size_t t = 0; t < idx.size(); ++t) os << (t ? "," : "") << idx[t];
        os << ')';
        return os.str();
    }
};

inline Label label_from_mask(std::uint64_t m) {
    std::vector<int> v;
    for (int i = 0; m; ++i, m >>= 1)
        if (m & 1) v.push_back(i + 1);
    return Label(std::move(v));
}

/// Exact binomial for the small arguments used in label bookkeeping.
inline std::uint64_t small_binom(int a, int b) {
    if (b < 0 || a < 0 || b > a) return 0;
    b = std::min(b, a - b);
    std::uint64_t r = 1;
    for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
    return r;
}

namespace detail {
inline int inversion_parity(std::span<const int> s) {
    int inv = 0;
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (s[i] > s[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}
}  // namespace detail

/// Sign of the permutation carrying `from` onto `to`; 0 unless both have
/// identical content without repeats.
inline int permutation_sign(std::span<const int> from, std::span<const int> to) {
    if (from.size() != to.size()) return 0;
    std::vector<int> a(from.begin(), from.end()), b(to.begin(), to.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end()) return 0;
    if (a != b) return 0;
    return detail::inversion_parity(from) * detail::inversion_parity(to);
}

/// epsilon^{prefix body}_{target}.
inline int epsilon(std::span<const int> prefix, std::span<const int> body, std::span<const int> target) {
    std::vector<int> seq(prefix.begin(), prefix.end());
    seq.insert(seq.end(), body.begin(), body.end());
    return permutation_sign(seq, target);
}

inline int epsilon(const Label& prefix, const Label& body, const Label& target) {
    return epsilon(prefix.idx, body.idx, target.idx);
}

/// epsilon^{A B}_{C D}: both sides are concatenations.
inline int epsilon2(const Label& a, const Label& b, const Label& c, const Label& d) {
    std::vector<int> lhs(a.idx), rhs(c.idx);
    lhs.insert(lhs.end(), b.idx.begin(), b.idx.end());
    rhs.insert(rhs.end(), d.idx.begin(), d.idx.end());
    return permutation_sign(lhs, rhs);
}

/// Sign for sorted, disjoint a and b whose union is sorted(a u b); 0 if they overlap.
/// Bitmask fast path of epsilon(a, b, a u b).
inline int merge_sign(std::uint64_t a, std::uint64_t b) {
    if (a & b) return 0;
    // each element of a passes over the elements of b smaller than it
    int swaps = 0;
    for (std::uint64_t m = a; m; m &= m - 1) {
        std::uint64_t low = (m & (~m + 1)) - 1;
        swaps += __builtin_popcountll(b & low);
    }
    return (swaps & 1) ? -1 : 1;
}

inline Label label_union(const Label& a, const Label& b) { return label_from_mask(a.mask() | b.mask()); }
inline Label label_difference(const Label& a, const Label& b) { return label_from_mask(a.mask() & ~b.mask()); }
inline Label label_intersection(const Label& a, const Label& b) { return label_from_mask(a.mask() & b.mask()); }

/// All alpha in S(n,k), graded reverse-lexicographic (largest first).
inline std::vector<MultiIndex> enum_multiindices(int n, int k) {
    if (n < 1) throw std::invalid_argument("enum_multiindices: n must be >= 1");
    if (k < 0) throw std::invalid_argument("enum_multiindices: k must be >= 0");
    std::vector<MultiIndex> out;
    std::vector<int> cur(static_cast<size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == n - 1) {
            cur[static_cast<size_t>(pos)] = left;
            out.emplace_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[static_cast<size_t>(pos)] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, k);
    // grevlex: the last differing exponent decides; the smaller one ranks first
    std::stable_sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
        for (int t = a.dim() - 1; t >= 0; --t)
            if (a[t] != b[t]) return a[t] < b[t];
        return false;
    });
    return out;
}

/// I(n,q) in lexicographic order.
inline std::vector<Label> enum_labels(int n, int q) {
    if (n < 0) throw std::invalid_argument("enum_labels: n must be >= 0");
    if (q < 0 || q > n) throw std::invalid_argument("enum_labels: need 0 <= q <= n");
    std::vector<Label> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == q) {
            out.emplace_back(cur);
            return;
        }
        for (int i = start; i <= n - (q - static_cast<int>(cur.size())) + 1; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

/// Cached I(N,q); the reference stays valid for the program lifetime.
inline const std::vector<Label>& labels_of(int N, int q) {
    static const std::vector<Label> none;
    if (q > N) return none;
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Label>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({N, q});
    if (it == cache.end()) it = cache.emplace(std::pair{N, q}, enum_labels(N, q)).first;
    return it->second;
}

/// Position of I in the lexicographic enumeration of I(N, |I|).
inline size_t label_rank(const Label& I, int N) {
    const int q = I.size();
    size_t rank = 0;
    int prev = 0;
    for (int t = 0; t < q; ++t) {
        for (int j = prev + 1; j < I.idx[static_cast<size_t>(t)]; ++j) rank += small_binom(N - j, q - t - 1);
        prev = I.idx[static_cast<size_t>(t)];
    }
    return rank;
}

inline MultiIndex embed_multiindex(const MultiIndex& alpha, int N) {
    if (N < alpha.dim()) throw std::invalid_argument("embed_multiindex: N must be >= n");
    std::vector<int> e = alpha.exps;
    e.resize(static_cast<size_t>(N), 0);
    return MultiIndex(std::move(e));
}

/// I' = {1..N} \ I together with epsilon^{I I'}_{(1..N)}, the Hodge-star sign.
inline std::pair<Label, int> complement(const Label& I, int N) {
    if (I.max_index() > N) throw std::invalid_argument("complement: label exceeds N");
    std::uint64_t full = (N >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << N) - 1);
    std::uint64_t cm = full & ~I.mask();
    return {label_from_mask(cm), merge_sign(I.mask(), cm)};
}

enum class OrderingKind { lexicographic, diagonal, chained, custom };

inline std::string to_string(OrderingKind k) {
    switch (k) {
        case OrderingKind::lexicographic: return "lexicographic";
        case OrderingKind::diagonal: return "diagonal";
        case OrderingKind::chained: return "chained";
        case OrderingKind::custom: return "custom";
    }
    return "custom";
}

inline OrderingKind ordering_kind_from_string(const std::string& s) {
    if (s == "lexicographic" || s == "lex") return OrderingKind::lexicographic;
    if (s == "diagonal") return OrderingKind::diagonal;
    if (s == "chained") return OrderingKind::chained;
    if (s == "custom") return OrderingKind::custom;
    throw std::invalid_argument("unknown ordering kind: " + s);
}

/// The bijection aleph : iS(n,k) -> I(N,l). Multi-indices are addressed by
/// their position in enum_multiindices(n,k), labels by their lex rank.
class Ordering {
public:
    Ordering(int n, int k, int ell, int N, OrderingKind kind, std::vector<int> forward)
        : n_(n), k_(k), ell_(ell), N_(N), kind_(kind),
          domain_(enum_multiindices(n, k)), labels_(enum_labels(N, ell)), forward_(std::move(forward)) {
        if (domain_.size() != labels_.size())
            throw std::invalid_argument("Ordering: |S(n,k)| != |I(N,l)|");
        if (forward_.size() != domain_.size()) throw std::invalid_argument("Ordering: table has wrong length");
        backward_.assign(forward_.size(), -1);
        for (size_t a = 0; a < forward_.size(); ++a) {
            int r = forward_[a];
            if (r < 0 || static_cast<size_t>(r) >= labels_.size() || backward_[static_cast<size_t>(r)] != -1)
                throw std::invalid_argument("Ordering: table is not a bijection");
            backward_[static_cast<size_t>(r)] = static_cast<int>(a);
        }
    }

    int n() const { return n_; }
    int k() const { return k_; }
    int ell() const { return ell_; }
    int N() const { return N_; }
    OrderingKind kind() const { return kind_; }
    size_t size() const { return domain_.size(); }

    const std::vector<MultiIndex>& multiindices() const { return domain_; }
    const MultiIndex& multiindex(size_t a) const { return domain_[a]; }
    const Label& label_of(size_t a) const { return labels_[static_cast<size_t>(forward_[a])]; }
    size_t alpha_of(size_t label_rank) const { return static_cast<size_t>(backward_[label_rank]); }
    const std::vector<int>& table() const { return forward_; }

    /// aleph(i alpha) for an embedded multi-index.
    const Label& forward(const MultiIndex& embedded) const {
        MultiIndex src(std::vector<int>(embedded.exps.begin(), embedded.exps.begin() + n_));
        if (!embedded.supported_in(n_)) throw std::invalid_argument("Ordering::forward: not in iS(n,k)");
        auto it = std::find(domain_.begin(), domain_.end(), src);
        if (it == domain_.end()) throw std::invalid_argument("Ordering::forward: not in iS(n,k)");
        return label_of(static_cast<size_t>(it - domain_.begin()));
    }

    /// aleph^{-1}(L) embedded into dimension N.
    MultiIndex backward(const Label& L) const {
        if (L.size() != ell_ || L.max_index() > N_) throw std::invalid_argument("Ordering::backward: not in I(N,l)");
        return embed_multiindex(domain_[alpha_of(label_rank(L, N_))], N_);
    }

    /// Canonical text of the table, the input of hash().
    std::string canonical() const {
        std::ostringstream os;
        os << n_ << ';' << k_ << ';' << ell_ << ';' << N_;
        for (size_t a = 0; a < size(); ++a) os << ';' << domain_[a].str() << "->" << label_of(a).str();
        return os.str();
    }

    /// FNV-1a of canonical(), hex.
    std::string hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 1099511628211ull;
        }
        static const char* digits = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<size_t>(i)] = digits[h & 15];
        return s;
    }

    bool operator==(const Ordering& o) const {
        return n_ == o.n_ && k_ == o.k_ && ell_ == o.ell_ && N_ == o.N_ && forward_ == o.forward_;
    }

private:
    int n_, k_, ell_, N_;
    OrderingKind kind_;
    std::vector<MultiIndex> domain_;
    std::vector<Label> labels_;
    std::vector<int> forward_;
    std::vector<int> backward_;
};

namespace detail {
// Assign `pinned` (alpha position -> label rank), then fill the rest in order.
inline std::vector<int> fill_ordering(size_t m, const std::vector<std::pair<size_t, size_t>>& pinned) {
    std::vector<int> fwd(m, -1);
    std::vector<bool> used(m, false);
    for (auto [a, r] : pinned) {
        if (fwd[a] != -1 || used[r]) throw std::invalid_argument("make_ordering: prefix assignment is not well defined");
        fwd[a] = static_cast<int>(r);
        used[r] = true;
    }
    size_t next = 0;
    for (size_t a = 0; a < m; ++a) {
        if (fwd[a] != -1) continue;
        while (used[next]) ++next;
        fwd[a] = static_cast<int>(next);
        used[next] = true;
    }
    return fwd;
}

inline size_t position_of(const std::vector<MultiIndex>& dom, const MultiIndex& a) {
    auto it = std::find(dom.begin(), dom.end(), a);
    if (it == dom.end()) throw std::invalid_argument("make_ordering: multi-index not in S(n,k)");
    return static_cast<size_t>(it - dom.begin());
}
}  // namespace detail

/// Build one of the named orderings. `diagonal` sends k e_j to the label (j);
/// `chained` sends (k,0,..) to (1) and e_1 + (k-1) e_j to (j). Everything not
/// pinned is assigned lexicographically.
inline Ordering make_ordering(int n, int k, int ell, int N, OrderingKind kind) {
    if (n < 1 || k < 0 || ell < 0 || N < n) throw std::invalid_argument("make_ordering: bad dimensions");
    const auto dom = enum_multiindices(n, k);
    const size_t m = dom.size();
    if (small_binom(N, ell) != m) throw std::invalid_argument("make_ordering: C(N,l) != C(n-1+k,k)");
    std::vector<std::pair<size_t, size_t>> pinned;
    switch (kind) {
        case OrderingKind::lexicographic:
            break;
        case OrderingKind::diagonal:
            if (ell != 1) throw std::invalid_argument("make_ordering: diagonal ordering needs l = 1");
            for (int j = 0; j < n; ++j) pinned.emplace_back(detail::position_of(dom, unit_multiindex(n, j, k)), j);
            break;
        case OrderingKind::chained:
            if (ell != 1) throw std::invalid_argument("make_ordering: chained ordering needs l = 1");
            if (k < 2) throw std::invalid_argument("make_ordering: chained ordering needs k >= 2");
            pinned.emplace_back(detail::position_of(dom, unit_multiindex(n, 0, k)), 0);
            for (int j = 1; j < n; ++j) {
                MultiIndex a = unit_multiindex(n, 0, 1) + unit_multiindex(n, j, k - 1);
                pinned.emplace_back(detail::position_of(dom, a), j);
            }
            break;
        case OrderingKind::custom:
            throw std::invalid_argument("make_ordering: custom orderings need an explicit table");
    }
    return Ordering(n, k, ell, N, kind, detail::fill_ordering(m, pinned));
}

inline Ordering make_custom_ordering(int n, int k, int ell, int N, std::vector<int> table) {
    return Ordering(n, k, ell, N, OrderingKind::custom, std::move(table));
}

/// Seeded uniformly random bijection.
inline Ordering random_ordering(int n, int k, int ell, int N, std::uint64_t seed) {
    std::vector<int> t(small_binom(n - 1 + k, k));
    std::iota(t.begin(), t.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(t.begin(), t.end(), rng);
    return make_custom_ordering(n, k, ell, N, std::move(t));
}

}  // namespace hodc
