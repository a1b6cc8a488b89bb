#include "fraisse/structure.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fraisse/error.hpp"

namespace fraisse {

Signature::Signature(std::vector<Relation> relations) : relations_(std::move(relations)) {
    std::set<std::string> seen;
    for (const auto& r : relations_) {
        if (r.arity < 1) throw Error(ErrorCode::OutOfRange, "relation " + r.name + " has arity < 1");
        if (!seen.insert(r.name).second) throw Error(ErrorCode::SignatureOverlap, "duplicate relation name " + r.name);
    }
}

int Signature::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
        if (relations_[i].name == name) return static_cast<int>(i);
    return -1;
}

bool Signature::binary() const {
    return std::all_of(relations_.begin(), relations_.end(), [](const Relation& r) { return r.arity == 2; });
}

int Signature::max_arity() const {
    int a = 0;
    for (const auto& r : relations_) a = std::max(a, r.arity);
    return a;
}

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

FiniteStructure::FiniteStructure(Signature signature, int size) : signature_(std::move(signature)), size_(size) {
    if (size < 0) throw Error(ErrorCode::OutOfRange, "negative structure size");
    tables_.reserve(signature_.size());
    for (const auto& r : signature_) tables_.emplace_back(ipow(static_cast<std::size_t>(size), r.arity), 0);
}

std::size_t FiniteStructure::index(std::size_t rel, const int* entries) const {
    std::size_t idx = 0;
    for (int i = 0; i < signature_[rel].arity; ++i) idx = idx * static_cast<std::size_t>(size_) + static_cast<std::size_t>(entries[i]);
    return idx;
}

void FiniteStructure::set(std::size_t rel, const Tuple& t, bool value) {
    if (static_cast<int>(t.size()) != signature_[rel].arity)
        throw Error(ErrorCode::OutOfRange, "tuple length does not match arity of " + signature_[rel].name);
    for (int e : t)
        if (e < 0 || e >= size_) throw Error(ErrorCode::OutOfRange, "tuple entry outside universe");
    tables_[rel][index(rel, t)] = value ? 1 : 0;
}

Tuple decode_tuple(std::size_t idx, int n, int arity) {
    Tuple t(static_cast<std::size_t>(arity));
    for (int i = arity - 1; i >= 0; --i) {
        t[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(n));
        idx /= static_cast<std::size_t>(n);
    }
    return t;
}

std::vector<Tuple> FiniteStructure::tuples(std::size_t rel) const {
    std::vector<Tuple> out;
    const auto& tab = tables_[rel];
    for (std::size_t i = 0; i < tab.size(); ++i)
        if (tab[i]) out.push_back(decode_tuple(i, size_, signature_[rel].arity));
    return out;
}

std::size_t FiniteStructure::count(std::size_t rel) const {
    return static_cast<std::size_t>(std::count(tables_[rel].begin(), tables_[rel].end(), std::uint8_t{1}));
}

std::vector<std::uint8_t> FiniteStructure::encoding() const {
    std::vector<std::uint8_t> bits;
    for (const auto& t : tables_) bits.insert(bits.end(), t.begin(), t.end());
    return bits;
}

bool FiniteStructure::operator<(const FiniteStructure& other) const {
    if (size_ != other.size_) return size_ < other.size_;
    return tables_ < other.tables_;
}

FiniteStructure permute(const FiniteStructure& s, const std::vector<int>& sigma) {
    FiniteStructure out(s.signature(), s.size());
    for (std::size_t r = 0; r < s.signature().size(); ++r) {
        int arity = s.signature()[r].arity;
        const auto& tab = s.table(r);
        Tuple image(static_cast<std::size_t>(arity));
        for (std::size_t i = 0; i < tab.size(); ++i) {
            if (!tab[i]) continue;
            Tuple t = decode_tuple(i, s.size(), arity);
            for (int k = 0; k < arity; ++k) image[static_cast<std::size_t>(k)] = sigma[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
            out.set_at(r, out.index(r, image), true);
        }
    }
    return out;
}

FiniteStructure canonical_form(const FiniteStructure& s, std::vector<int>& best_sigma) {
    const int n = s.size();
    // perm[v] = old vertex placed at new position v.
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::uint8_t> best;
    std::vector<int> best_perm = perm;
    std::vector<std::uint8_t> current;
    bool have = false;
    const auto& sig = s.signature();
    do {
        current.clear();
        bool greater = false;
        bool smaller = !have;
        std::size_t pos = 0;
        for (std::size_t r = 0; r < sig.size() && !greater; ++r) {
            int arity = sig[r].arity;
            std::size_t total = s.table_size(r);
            Tuple t(static_cast<std::size_t>(arity), 0);
            for (std::size_t i = 0; i < total; ++i, ++pos) {
                std::size_t idx = 0;
                for (int k = 0; k < arity; ++k) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(perm[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])]);
                std::uint8_t bit = s.holds_at(r, idx) ? 1 : 0;
                if (!smaller) {
                    if (bit > best[pos]) {
                        greater = true;
                        break;
                    }
                    if (bit < best[pos]) smaller = true;
                }
                current.push_back(bit);
                for (int k = arity - 1; k >= 0; --k) {
                    if (++t[static_cast<std::size_t>(k)] < n) break;
                    t[static_cast<std::size_t>(k)] = 0;
                }
            }
        }
        if (!greater && smaller) {
            best = current;
            best_perm = perm;
            have = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    best_sigma.assign(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) best_sigma[static_cast<std::size_t>(best_perm[static_cast<std::size_t>(v)])] = v;
    return permute(s, best_sigma);
}

FiniteStructure canonical_form(const FiniteStructure& s) {
    std::vector<int> sigma;
    return canonical_form(s, sigma);
}

bool isomorphic(const FiniteStructure& a, const FiniteStructure& b) {
    if (a.signature() != b.signature() || a.size() != b.size()) return false;
    return canonical_form(a) == canonical_form(b);
}

bool is_embedding(const FiniteStructure& a, const FiniteStructure& b, const Embedding& f) {
    if (a.signature() != b.signature()) return false;
    if (static_cast<int>(f.size()) != a.size()) return false;
    std::set<int> image(f.begin(), f.end());
    if (static_cast<int>(image.size()) != a.size()) return false;
    for (int v : f)
        if (v < 0 || v >= b.size()) return false;
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        int arity = a.signature()[r].arity;
        Tuple mapped(static_cast<std::size_t>(arity));
        for (std::size_t i = 0; i < a.table_size(r); ++i) {
            Tuple t = decode_tuple(i, a.size(), arity);
            for (int k = 0; k < arity; ++k) mapped[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
            if (a.holds_at(r, i) != b.holds(r, mapped)) return false;
        }
    }
    return true;
}

namespace {

struct Check {
    std::size_t rel;
    Tuple tuple;  // over domain vertices 0..v
    bool value;
};

// Tuples over {0..v} that mention v, grouped by v.
std::vector<std::vector<Check>> checks_by_vertex(const FiniteStructure& a) {
    std::vector<std::vector<Check>> out(static_cast<std::size_t>(a.size()));
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        int arity = a.signature()[r].arity;
        for (std::size_t i = 0; i < a.table_size(r); ++i) {
            Tuple t = decode_tuple(i, a.size(), arity);
            int mx = *std::max_element(t.begin(), t.end());
            out[static_cast<std::size_t>(mx)].push_back({r, t, a.holds_at(r, i)});
        }
    }
    return out;
}

}  // namespace

std::vector<Embedding> find_embeddings(const FiniteStructure& a, const FiniteStructure& b, std::size_t limit,
                                       const SearchContext& ctx) {
    if (a.signature() != b.signature()) throw Error(ErrorCode::SignatureMismatch, "embedding search across different signatures");
    std::vector<Embedding> out;
    const int na = a.size();
    const int nb = b.size();
    if (na > nb) return out;
    auto checks = checks_by_vertex(a);
    Embedding f(static_cast<std::size_t>(na), -1);
    std::vector<char> used(static_cast<std::size_t>(nb), 0);
    Tuple mapped;
    std::function<bool(int)> rec = [&](int v) -> bool {
        if (v == na) {
            out.push_back(f);
            return limit != 0 && out.size() >= limit;
        }
        for (int w = 0; w < nb; ++w) {
            if (used[static_cast<std::size_t>(w)]) continue;
            ctx.charge();
            f[static_cast<std::size_t>(v)] = w;
            bool ok = true;
            for (const auto& c : checks[static_cast<std::size_t>(v)]) {
                mapped.resize(c.tuple.size());
                for (std::size_t k = 0; k < c.tuple.size(); ++k) mapped[k] = f[static_cast<std::size_t>(c.tuple[k])];
                if (b.holds(c.rel, mapped) != c.value) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            used[static_cast<std::size_t>(w)] = 1;
            bool stop = rec(v + 1);
            used[static_cast<std::size_t>(w)] = 0;
            if (stop) return true;
        }
        f[static_cast<std::size_t>(v)] = -1;
        return false;
    };
    rec(0);
    return out;
}

std::optional<Embedding> find_first_embedding(const FiniteStructure& a, const FiniteStructure& b, const SearchContext& ctx) {
    auto all = find_embeddings(a, b, 1, ctx);
    if (all.empty()) return std::nullopt;
    return all.front();
}

FiniteStructure induced_substructure(const FiniteStructure& s, std::vector<int> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    for (int v : subset)
        if (v < 0 || v >= s.size()) throw Error(ErrorCode::OutOfRange, "vertex " + std::to_string(v) + " not in universe");
    return pullback(s, subset);
}

FiniteStructure pullback(const FiniteStructure& s, const std::vector<int>& subset) {
    const int k = static_cast<int>(subset.size());
    FiniteStructure out(s.signature(), k);
    for (std::size_t r = 0; r < s.signature().size(); ++r) {
        int arity = s.signature()[r].arity;
        Tuple orig(static_cast<std::size_t>(arity));
        for (std::size_t i = 0; i < out.table_size(r); ++i) {
            Tuple t = decode_tuple(i, k, arity);
            for (int j = 0; j < arity; ++j) orig[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(t[static_cast<std::size_t>(j)])];
            out.set_at(r, i, s.holds(r, orig));
        }
    }
    return out;
}

FiniteStructure reduct(const FiniteStructure& s, const Signature& sub) {
    FiniteStructure out(sub, s.size());
    for (std::size_t r = 0; r < sub.size(); ++r) {
        int src = s.signature().index_of(sub[r].name);
        if (src < 0 || s.signature()[static_cast<std::size_t>(src)].arity != sub[r].arity)
            throw Error(ErrorCode::SignatureMismatch, "relation " + sub[r].name + " not in structure signature");
        for (std::size_t i = 0; i < out.table_size(r); ++i) out.set_at(r, i, s.holds_at(static_cast<std::size_t>(src), i));
    }
    return out;
}

FiniteStructure glue(const FiniteStructure& a, const FiniteStructure& b, const std::vector<int>& f) {
    for (const auto& r : b.signature())
        if (a.signature().contains(r.name)) throw Error(ErrorCode::SignatureOverlap, "relation " + r.name + " occurs in both signatures");
    if (a.size() != b.size() || static_cast<int>(f.size()) != a.size()) throw Error(ErrorCode::NotBijective, "universes differ in size");
    std::set<int> image(f.begin(), f.end());
    if (static_cast<int>(image.size()) != a.size() || (!image.empty() && (*image.begin() < 0 || *image.rbegin() >= b.size())))
        throw Error(ErrorCode::NotBijective, "gluing map is not a bijection");
    std::vector<Relation> rels = a.signature().relations();
    rels.insert(rels.end(), b.signature().begin(), b.signature().end());
    FiniteStructure out(Signature(rels), a.size());
    for (std::size_t r = 0; r < a.signature().size(); ++r)
        for (std::size_t i = 0; i < a.table_size(r); ++i) out.set_at(r, i, a.holds_at(r, i));
    const std::size_t off = a.signature().size();
    for (std::size_t r = 0; r < b.signature().size(); ++r) {
        int arity = b.signature()[r].arity;
        Tuple mapped(static_cast<std::size_t>(arity));
        for (std::size_t i = 0; i < out.table_size(off + r); ++i) {
            Tuple t = decode_tuple(i, a.size(), arity);
            for (int k = 0; k < arity; ++k) mapped[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
            out.set_at(off + r, i, b.holds(r, mapped));
        }
    }
    return out;
}

FiniteStructure expand(const FiniteStructure& s, const Signature& bigger) {
    FiniteStructure out(bigger, s.size());
    for (std::size_t r = 0; r < bigger.size(); ++r) {
        int src = s.signature().index_of(bigger[r].name);
        if (src < 0) continue;
        if (s.signature()[static_cast<std::size_t>(src)].arity != bigger[r].arity)
            throw Error(ErrorCode::SignatureMismatch, "arity mismatch for " + bigger[r].name);
        for (std::size_t i = 0; i < out.table_size(r); ++i) out.set_at(r, i, s.holds_at(static_cast<std::size_t>(src), i));
    }
    return out;
}

}  // namespace fraisse
