#include "fraisse/ranks.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"

namespace fraisse {

BipartiteCode code_star(BipartiteCode g, int n) {
    BipartiteCode out = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (code_has(g, n, i, j)) out |= BipartiteCode{1} << (j * n + i);
    return out;
}

bool code_symmetric(BipartiteCode g, int n) { return code_star(g, n) == g; }

bool code_has(BipartiteCode g, int n, int i, int j) { return (g >> (i * n + j)) & 1u; }

namespace {

BigInt pow2(long e) {
    BigInt one = 1;
    return one << e;
}

json big_json(const BigInt& v) {
    if (v <= BigInt(std::numeric_limits<std::int64_t>::max()) && v >= 0) return static_cast<std::int64_t>(v);
    return v.str();
}

long binom2(long n) { return n * (n - 1) / 2; }

}  // namespace

BipartiteCounts bipartite_counts(int n) {
    if (n < 1) throw Error(ErrorCode::OutOfRange, "bipartite counts need n >= 1");
    BipartiteCounts c;
    const long nn = n;
    c.total = pow2(nn * nn);
    c.symmetric = pow2(binom2(nn + 1));
    c.nonsymmetric = c.total - c.symmetric;
    if (n <= 3) {
        const BipartiteCode codes = BipartiteCode{1} << (n * n);
        std::uint64_t sym = 0;
        for (BipartiteCode g = 0; g < codes; ++g)
            if (code_symmetric(g, n)) ++sym;
        if (BigInt(codes) != c.total || BigInt(sym) != c.symmetric)
            throw Error(ErrorCode::Overflow, "bipartite count formula disagrees with enumeration");
        c.brute_checked = true;
    }
    return c;
}

std::size_t s2_count(const ClassSpec& k, int m, const SearchContext& ctx) { return enumerate_pair_types(power(k, m), ctx).size(); }

namespace {

PairType pair_type_of(const FiniteStructure& a, int x, int y) {
    PairType p;
    const int v[2] = {x, y};
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        std::uint8_t bits = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (a.holds(r, Tuple{v[i], v[j]})) bits |= static_cast<std::uint8_t>(1u << (2 * i + j));
        p.atoms.push_back(bits);
    }
    return p;
}

void require_single_binary(const ClassSpec& k) {
    if (k.signature.size() != 1 || k.signature[0].arity != 2)
        throw Error(ErrorCode::HypothesisUnmet, k.name + " is not a class with a single binary relation");
}

Formula code_formula(BipartiteCode g, int n, const std::string& rel) {
    std::vector<Formula> parts;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Formula at = Formula::atom(rel, {Term::at(0, i), Term::at(1, j)});
            parts.push_back(code_has(g, n, i, j) ? at : Formula::negate(at));
        }
    }
    return Formula::conj(std::move(parts));
}

}  // namespace

const std::vector<BipartiteCode>& QuadConstruction::codes_for(const FiniteStructure& a, int x, int y) const {
    PairType p = pair_type_of(a, x, y);
    auto it = std::lower_bound(types.begin(), types.end(), p);
    if (it == types.end() || !(*it == p)) throw Error(ErrorCode::WitnessMissing, "pair type outside S_2");
    return h[static_cast<std::size_t>(it - types.begin())];
}

QuadConstruction make_quad_construction(const ClassSpec& k, int n, const std::string& graph_relation, const SearchContext& ctx) {
    require_single_binary(k);
    if (n < 1 || n > 3) throw Error(ErrorCode::OutOfRange, "quadratic construction supports 1 <= n <= 3");
    const bool refl = k.has(0, Property::Reflexive);
    const bool irr = k.has(0, Property::Irreflexive);
    const bool sym = k.has(0, Property::Symmetric);
    const bool tri = k.has(0, Property::Trichotomous);
    if (!refl && !irr) throw Error(ErrorCode::HypothesisUnmet, k.name + " is neither reflexive nor irreflexive");
    if (!sym && !tri) throw Error(ErrorCode::HypothesisUnmet, k.name + " is neither symmetric nor trichotomous");
    if (!sym && refl)
        throw Error(ErrorCode::HypothesisUnmet, k.name + " is reflexive and trichotomous: the empty code of (f(a), f(a)) is symmetric");

    QuadConstruction q;
    q.base = k;
    q.n = n;
    q.m = n * n - 1;
    q.index = power(k, q.m);
    q.symmetric_case = sym;
    q.graph_relation = graph_relation;
    q.interpretation = trivial_configuration(Signature({Relation{graph_relation, 2}}), n);
    q.interpretation.index_spec = q.index;
    if (q.m == 0) return q;

    q.types = enumerate_pair_types(q.index, ctx);
    q.h.assign(q.types.size(), {});
    const BipartiteCode codes = BipartiteCode{1} << (n * n);
    const std::size_t msz = static_cast<std::size_t>(q.m);

    // Allowed outputs in increasing order of their smallest code.
    std::vector<std::vector<BipartiteCode>> outputs;
    for (BipartiteCode g = 0; g < codes; ++g) {
        BipartiteCode s = code_star(g, n);
        if (s < g) continue;
        if (sym) {
            if (g == 0 && irr) continue;
            outputs.push_back(s == g ? std::vector<BipartiteCode>{g} : std::vector<BipartiteCode>{g, s});
        } else if (s != g) {
            outputs.push_back({g, s});
        }
    }
    std::size_t next = 0;
    if (sym) {
        q.capacity = outputs.size();
        if (q.types.size() > q.capacity)
            throw Error(ErrorCode::CapacityExceeded, std::to_string(q.types.size()) + " pair types exceed " + std::to_string(q.capacity) + " outputs");
        if (refl) {
            // (f(a), f(a)) carries the empty code, so the all-E type owns it.
            PairType top;
            top.atoms.assign(msz, 0xF);
            auto it = std::lower_bound(q.types.begin(), q.types.end(), top);
            if (it == q.types.end() || !(*it == top)) throw Error(ErrorCode::HypothesisUnmet, "no pair type entails every relation");
            q.h[static_cast<std::size_t>(it - q.types.begin())] = outputs[0];
            next = 1;
        }
        for (std::size_t t = 0; t < q.types.size(); ++t)
            if (q.h[t].empty()) q.h[t] = outputs[next++];
    } else {
        q.capacity = 2 * outputs.size();
        if (q.types.size() > q.capacity)
            throw Error(ErrorCode::CapacityExceeded, std::to_string(q.types.size()) + " pair types exceed " + std::to_string(q.capacity) + " outputs");
        for (std::size_t t = 0; t < q.types.size(); ++t) {
            if (!q.h[t].empty()) continue;
            PairType star = q.types[t].star();
            auto it = std::lower_bound(q.types.begin(), q.types.end(), star);
            if (it == q.types.end() || !(*it == star) || static_cast<std::size_t>(it - q.types.begin()) == t)
                throw Error(ErrorCode::HypothesisUnmet, "pair type without a distinct reverse");
            q.h[t] = {outputs[next][0]};
            q.h[static_cast<std::size_t>(it - q.types.begin())] = {outputs[next][1]};
            ++next;
        }
    }

    for (std::size_t i = 0; i < msz; ++i) {
        std::vector<Formula> parts;
        for (std::size_t t = 0; t < q.types.size(); ++t) {
            if (!((q.types[t].atoms[i] >> 1) & 1u)) continue;
            for (BipartiteCode g : q.h[t]) parts.push_back(code_formula(g, n, graph_relation));
        }
        q.interpretation.formulas[q.index.signature[i].name] = Formula::disj(std::move(parts));
    }
    return q;
}

bool check_quad_assignment(const QuadConstruction& q) {
    std::set<BipartiteCode> used;
    std::size_t total = 0;
    for (std::size_t t = 0; t < q.types.size(); ++t) {
        const auto& out = q.h[t];
        if (out.empty()) return false;
        for (BipartiteCode g : out) {
            used.insert(g);
            ++total;
        }
        if (q.symmetric_case) {
            BipartiteCode g = out[0];
            std::vector<BipartiteCode> expect = code_symmetric(g, q.n) ? std::vector<BipartiteCode>{g}
                                                                        : std::vector<BipartiteCode>{g, code_star(g, q.n)};
            std::sort(expect.begin(), expect.end());
            std::vector<BipartiteCode> got = out;
            std::sort(got.begin(), got.end());
            if (got != expect) return false;
        } else {
            if (out.size() != 1 || code_symmetric(out[0], q.n)) return false;
            PairType star = q.types[t].star();
            auto it = std::lower_bound(q.types.begin(), q.types.end(), star);
            if (it == q.types.end() || !(*it == star)) return false;
            const auto& sh = q.h[static_cast<std::size_t>(it - q.types.begin())];
            if (sh.size() != 1 || sh[0] != code_star(out[0], q.n)) return false;
        }
    }
    return used.size() == total;
}

FiniteStructure quad_r_graph(const QuadConstruction& q, const FiniteStructure& a) {
    FiniteStructure g(Signature({Relation{q.graph_relation, 2}}), q.n * a.size());
    for (int x = 0; x < a.size(); ++x) {
        for (int y = x + 1; y < a.size(); ++y) {
            const BipartiteCode code = q.codes_for(a, x, y).front();
            for (int i = 0; i < q.n; ++i) {
                for (int j = 0; j < q.n; ++j) {
                    if (!code_has(code, q.n, i, j)) continue;
                    g.set(0, {x * q.n + i, y * q.n + j});
                    g.set(0, {y * q.n + j, x * q.n + i});
                }
            }
        }
    }
    return g;
}

WitnessSource quad_witness_source(const QuadConstruction& q, const GenericModel& target, const SearchContext& ctx) {
    return [&q, &target, ctx](const FiniteStructure& a) -> std::optional<Witness> {
        FiniteStructure rg = quad_r_graph(q, a);
        auto emb = find_first_embedding(rg, target.structure, ctx);
        if (!emb) return std::nullopt;
        Witness w(static_cast<std::size_t>(a.size()));
        for (int x = 0; x < a.size(); ++x)
            for (int i = 0; i < q.n; ++i) w[static_cast<std::size_t>(x)].push_back((*emb)[static_cast<std::size_t>(x * q.n + i)]);
        return w;
    };
}

namespace {

void require_graph_target(const GenericModel& target) {
    const ClassSpec& s = target.spec;
    if (s.signature.size() != 1 || s.signature[0].arity != 2 || !s.has(0, Property::Symmetric) || !s.has(0, Property::Irreflexive))
        throw Error(ErrorCode::HypothesisUnmet, "target " + s.name + " is not a graph model");
}

}  // namespace

QuadResult build_quad_configuration(const ClassSpec& k, int n, const GenericModel& target, int bound, const SearchContext& ctx) {
    if (n < 2) throw Error(ErrorCode::OutOfRange, "quadratic configuration needs n >= 2");
    require_graph_target(target);
    if (target.embedding_size < n * bound)
        throw Error(ErrorCode::UnderCertifiedTarget, "R-graphs have " + std::to_string(n * bound) + " points but the target only embeds members up to size " +
                                                         std::to_string(target.embedding_size));
    QuadResult res;
    res.construction = make_quad_construction(k, n, target.spec.signature[0].name, ctx);
    if (!check_quad_assignment(res.construction)) throw Error(ErrorCode::CapacityExceeded, "greedy assignment violates the case constraints");
    res.result = verify_configuration(res.construction.interpretation, target, bound, ctx, quad_witness_source(res.construction, target, ctx));
    return res;
}

namespace {

std::mutex selfsim_mu;
// Verdict and node cost; hits charge the cost again so budgets do not depend on the cache.
std::map<std::string, std::pair<bool, std::uint64_t>> selfsim_cache;

bool self_similar_cached(const ClassSpec& k, const SearchContext& ctx) {
    std::optional<std::pair<bool, std::uint64_t>> hit;
    {
        std::lock_guard<std::mutex> lock(selfsim_mu);
        auto it = selfsim_cache.find(k.name);
        if (it != selfsim_cache.end()) hit = it->second;
    }
    if (!hit) {
        const std::uint64_t room = ctx.budget ? ctx.budget->limit() - ctx.budget->used() : std::numeric_limits<std::uint64_t>::max();
        Budget local(room);
        SearchContext inner{&local, ctx.jobs};
        hit = {check_self_similarity(k, 3, inner).verified(), local.used()};
        std::lock_guard<std::mutex> lock(selfsim_mu);
        selfsim_cache[k.name] = *hit;
    }
    ctx.charge(hit->second);
    return hit->first;
}

}  // namespace

UpperBound counting_upper_bound(const ClassSpec& k, int n, const SearchContext& ctx) {
    require_single_binary(k);
    if (n < 1) throw Error(ErrorCode::OutOfRange, "tuple length must be at least 1");
    if (!check_fully_relational(k, 2, 2, ctx).verified()) throw Error(ErrorCode::HypothesisUnmet, k.name + " is not fully relational");
    if (!self_similar_cached(k, ctx))
        throw Error(ErrorCode::HypothesisUnmet, k.name + " is not definably self-similar (refuted at bound 3)");
    const bool refl = k.has(0, Property::Reflexive);
    const bool irr = k.has(0, Property::Irreflexive);
    const bool sym = k.has(0, Property::Symmetric);
    const bool tri = k.has(0, Property::Trichotomous);
    UpperBound ub;
    const int nn = n * n;
    const bool strict = (refl || irr) && (tri || (sym && n >= 2));
    ub.value = strict ? nn - 1 : nn;
    ub.justification = !strict ? "counting-nonstrict" : tri ? "counting-strict-trichotomous" : "counting-strict-symmetric";
    ub.details = {{"n", n},
                  {"codes", big_json(pow2(nn))},
                  {"hypotheses", {{"fully_relational", true}, {"self_similar_bound", 3}, {"reflexive", refl}, {"irreflexive", irr}}}};
    // A K^{*(bound+1)}-configuration would need 2^(bound+1) <= |S_2| distinct images among the codes.
    const int next = ub.value + 1;
    if (next <= 9) ub.details["s2_next"] = s2_count(k, next, ctx);
    ub.details["inequality"] = strict ? "2^m <= |S_2| < |G^n| = 2^(n^2)" : "2^m <= |S_2| <= |G^n| = 2^(n^2)";
    return ub;
}

InterpretationMap make_E_box_interpretation(int m, const Signature& target_signature) {
    if (m < 1) throw Error(ErrorCode::OutOfRange, "box interpretation needs m >= 1");
    InterpretationMap interp;
    interp.index_spec = power(spec_E(), m);
    interp.target_signature = target_signature;
    interp.tuple_length = m + 1;
    for (int i = 0; i < m; ++i)
        interp.formulas[interp.index_spec.signature[static_cast<std::size_t>(i)].name] = Formula::equal(Term::at(0, i), Term::at(1, i));
    return interp;
}

std::vector<Tuple> box_embedding(const FiniteStructure& a) {
    const int m = static_cast<int>(a.signature().size());
    std::vector<Tuple> coords(static_cast<std::size_t>(a.size()), Tuple(static_cast<std::size_t>(m + 1), 0));
    for (int i = 0; i < m; ++i) {
        int classes = 0;
        for (int x = 0; x < a.size(); ++x) {
            int c = -1;
            for (int y = 0; y < x && c < 0; ++y)
                if (a.holds(static_cast<std::size_t>(i), Tuple{x, y})) c = coords[static_cast<std::size_t>(y)][static_cast<std::size_t>(i)];
            coords[static_cast<std::size_t>(x)][static_cast<std::size_t>(i)] = c >= 0 ? c : classes++;
        }
    }
    for (int x = 0; x < a.size(); ++x) {
        int pos = 0;
        for (int y = 0; y < x; ++y) {
            bool same = true;
            for (int i = 0; i < m && same; ++i) same = a.holds(static_cast<std::size_t>(i), Tuple{x, y});
            if (same) ++pos;
        }
        coords[static_cast<std::size_t>(x)][static_cast<std::size_t>(m)] = pos;
    }
    return coords;
}

ConfigResult build_E_box_configuration(int m, const GenericModel& target, int bound, const SearchContext& ctx) {
    if (target.structure.size() < bound)
        throw Error(ErrorCode::BoundExceeded, "box witnesses need " + std::to_string(bound) + " distinct target points");
    InterpretationMap interp = make_E_box_interpretation(m, target.structure.signature());
    return verify_configuration(interp, target, bound, ctx, [](const FiniteStructure& a) -> std::optional<Witness> { return box_embedding(a); });
}

EOrdersResult build_E_into_orders(int k, const GenericModel& target, int bound, const SearchContext& ctx) {
    if (k < 2) throw Error(ErrorCode::OutOfRange, "k must be at least 2");
    const Signature& sig = target.structure.signature();
    if (static_cast<int>(sig.size()) != k || !sig.binary()) throw Error(ErrorCode::SignatureMismatch, "target is not over k binary relations");
    if (target.embedding_size < bound)
        throw Error(ErrorCode::UnderCertifiedTarget, "target embeds members only up to size " + std::to_string(target.embedding_size));
    const int m = k / 2;
    EOrdersResult res;
    InterpretationMap& interp = res.interpretation;
    interp.index_spec = power(spec_E(), m);
    interp.target_signature = sig;
    interp.tuple_length = 1;
    for (int i = 0; i < m; ++i) {
        Formula lo = Formula::atom(sig[static_cast<std::size_t>(2 * i)].name, {Term::at(0, 0), Term::at(1, 0)});
        Formula hi = Formula::atom(sig[static_cast<std::size_t>(2 * i + 1)].name, {Term::at(0, 0), Term::at(1, 0)});
        interp.formulas[interp.index_spec.signature[static_cast<std::size_t>(i)].name] =
            Formula::disj({Formula::conj({lo, hi}), Formula::conj({Formula::negate(lo), Formula::negate(hi)})});
    }
    WitnessSource source = [&](const FiniteStructure& a) -> std::optional<Witness> {
        auto x = box_embedding(a);
        FiniteStructure orders(sig, a.size());
        for (int p = 0; p < a.size(); ++p) {
            for (int q = 0; q < a.size(); ++q) {
                if (p == q) continue;
                const Tuple& u = x[static_cast<std::size_t>(p)];
                const Tuple& v = x[static_cast<std::size_t>(q)];
                const bool lex = u < v;
                for (int i = 0; i < m; ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    if (u[iu] < v[iu] || (u[iu] == v[iu] && lex)) orders.set(static_cast<std::size_t>(2 * i), {p, q});
                    if (u[iu] > v[iu] || (u[iu] == v[iu] && lex)) orders.set(static_cast<std::size_t>(2 * i + 1), {p, q});
                }
                // With k odd the last order is arbitrary; lexicographic here.
                if (k % 2 == 1 && lex) orders.set(static_cast<std::size_t>(k - 1), {p, q});
            }
        }
        auto emb = find_first_embedding(orders, target.structure, ctx);
        if (!emb) return std::nullopt;
        Witness w;
        for (int v : *emb) w.push_back({v});
        return w;
    };
    res.result = verify_configuration(interp, target, bound, ctx, source);
    res.type_count = count_nonequality_pair_types(target.structure);
    const BigInt types = pow2(k);
    const BigInt needed = 2 * (types - 1);
    res.pigeonhole = needed > types;
    res.record = {{"k", k},
                  {"m", m},
                  {"type_count", res.type_count},
                  {"expected_type_count", big_json(types)},
                  {"types_matches", BigInt(res.type_count) == types},
                  {"needed_by_Ek", big_json(needed)},
                  {"pigeonhole", res.pigeonhole}};
    return res;
}

namespace {

std::vector<std::vector<int>> all_functions(int depth, int length) {
    std::vector<std::vector<int>> out;
    std::vector<int> g(static_cast<std::size_t>(depth), 0);
    while (true) {
        out.push_back(g);
        int i = depth - 1;
        while (i >= 0 && g[static_cast<std::size_t>(i)] == length - 1) g[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++g[static_cast<std::size_t>(i)];
    }
    return out;
}

int numeral(const std::vector<int>& digits, int base) {
    int p = 0;
    for (int d : digits) p = p * base + d;
    return p;
}

bool order_like(const ClassSpec& k) {
    if (!k.binary() || k.signature.empty()) return false;
    for (std::size_t r = 0; r < k.signature.size(); ++r)
        if (!k.has(r, Property::Trichotomous) || !k.has(r, Property::Transitive) || !k.has(r, Property::Irreflexive)) return false;
    return true;
}

bool equivalence_like(const ClassSpec& k) {
    if (!k.binary() || k.signature.empty()) return false;
    for (std::size_t r = 0; r < k.signature.size(); ++r)
        if (!k.has(r, Property::Reflexive) || !k.has(r, Property::Symmetric) || !k.has(r, Property::Transitive)) return false;
    return true;
}

struct Layout {
    FiniteStructure a;
    std::vector<int> row_points;
    std::vector<int> column_points;
};

Layout ird_layout(const ClassSpec& index, int length) {
    if (!order_like(index)) throw Error(ErrorCode::HypothesisUnmet, index.name + " is not a superposition of linear orders");
    if (length < 1) throw Error(ErrorCode::OutOfRange, "pattern length must be at least 1");
    const int m = static_cast<int>(index.signature.size());
    const int side = 2 * length;
    FiniteStructure grid = build_product_order_model(m, side).structure;
    std::vector<int> rows, cols;
    for (const auto& g : all_functions(m, length)) {
        std::vector<int> gp;
        for (int v : g) gp.push_back(2 * v + 1);
        rows.push_back(numeral(gp, side));
    }
    for (int j = 0; j < length; ++j) cols.push_back(numeral(std::vector<int>(static_cast<std::size_t>(m), 2 * j), side));
    std::vector<int> used = rows;
    used.insert(used.end(), cols.begin(), cols.end());
    std::sort(used.begin(), used.end());
    FiniteStructure sub = induced_substructure(grid, used);
    FiniteStructure a(index.signature, sub.size());
    for (std::size_t r = 0; r < index.signature.size(); ++r)
        for (std::size_t i = 0; i < a.table_size(r); ++i) a.set_at(r, i, sub.holds_at(r, i));
    auto pos = [&](int p) { return static_cast<int>(std::lower_bound(used.begin(), used.end(), p) - used.begin()); };
    Layout out{a, {}, {}};
    for (int p : rows) out.row_points.push_back(pos(p));
    for (int p : cols) out.column_points.push_back(pos(p));
    return out;
}

Layout ict_layout(const ClassSpec& index, int length) {
    if (!equivalence_like(index)) throw Error(ErrorCode::HypothesisUnmet, index.name + " is not a superposition of equivalence relations");
    if (length < 1) throw Error(ErrorCode::OutOfRange, "pattern length must be at least 1");
    const int m = static_cast<int>(index.signature.size());
    auto points = all_functions(m, length);
    const int size = static_cast<int>(points.size());
    FiniteStructure a(index.signature, size);
    for (int i = 0; i < m; ++i)
        for (int x = 0; x < size; ++x)
            for (int y = 0; y < size; ++y)
                if (points[static_cast<std::size_t>(x)][static_cast<std::size_t>(i)] == points[static_cast<std::size_t>(y)][static_cast<std::size_t>(i)])
                    a.set(static_cast<std::size_t>(i), {x, y});
    Layout out{a, {}, {}};
    for (int x = 0; x < size; ++x) out.row_points.push_back(x);
    for (int j = 0; j < length; ++j) out.column_points.push_back(numeral(std::vector<int>(static_cast<std::size_t>(m), j), length));
    return out;
}

PatternWitness extract_pattern(const std::string& kind, const Layout& layout, const InterpretationMap& interp, const GenericModel& target,
                               int length, const WitnessSource& source, const SearchContext& ctx) {
    interp.validate();
    if (interp.target_signature != target.structure.signature()) throw Error(ErrorCode::SignatureMismatch, "interpretation target differs from the model");
    const FiniteStructure& a = layout.a;
    const int m = static_cast<int>(interp.index_spec.signature.size());
    std::optional<Witness> f;
    if (source) f = source(a);
    if (!f || !witness_valid(interp, target.structure, a, *f)) f = find_witness(interp, target.structure, a, ctx);
    if (!f) {
        const int needed = interp.tuple_length * a.size() + static_cast<int>(interp.parameters.size());
        if (target.embedding_size < needed)
            throw Error(ErrorCode::UnderCertifiedTarget, "pattern needs " + std::to_string(needed) + " target points, model embeds " +
                                                             std::to_string(target.embedding_size));
        throw Error(ErrorCode::WitnessMissing, "no witness for the " + kind + " source structure");
    }
    PatternWitness pw;
    pw.kind = kind;
    pw.depth = m;
    pw.length = length;
    pw.parameters = interp.parameters;
    for (const auto& r : interp.index_spec.signature) pw.formulas.push_back(bind(interp.formula(r.name), interp.target_signature));
    pw.rows = all_functions(m, length);
    for (int p : layout.row_points) pw.row_tuples.push_back((*f)[static_cast<std::size_t>(p)]);
    for (int p : layout.column_points) pw.columns.push_back((*f)[static_cast<std::size_t>(p)]);
    bool ok = witness_valid(interp, target.structure, a, *f);
    for (std::size_t g = 0; g < pw.rows.size(); ++g) {
        std::vector<std::vector<int>> per_i;
        for (int i = 0; i < m; ++i) {
            std::vector<int> per_j;
            for (int j = 0; j < length; ++j) {
                bool v = evaluate(pw.formulas[static_cast<std::size_t>(i)], target.structure, {pw.row_tuples[g], pw.columns[static_cast<std::size_t>(j)]},
                                  interp.parameters);
                const int gi = pw.rows[g][static_cast<std::size_t>(i)];
                const bool want = kind == "IRD" ? gi < j : gi == j;
                ok = ok && v == want;
                per_j.push_back(v ? 1 : 0);
            }
            per_i.push_back(per_j);
        }
        pw.signs.push_back(per_i);
    }
    pw.verified = ok;
    return pw;
}

}  // namespace

json PatternWitness::to_json() const {
    json fs = json::array();
    for (const auto& f : formulas) fs.push_back(to_string(f));
    return {{"kind", kind},   {"depth", depth},   {"length", length},          {"formulas", fs},       {"parameters", parameters},
            {"rows", rows},   {"row_tuples", row_tuples}, {"columns", columns}, {"signs", signs}, {"verified", verified}};
}

FiniteStructure IRD_source_structure(const ClassSpec& index, int length) { return ird_layout(index, length).a; }
FiniteStructure ICT_source_structure(const ClassSpec& index, int length) { return ict_layout(index, length).a; }

PatternWitness extract_IRD_pattern(const InterpretationMap& interp, const GenericModel& target, int length, const WitnessSource& source,
                                   const SearchContext& ctx) {
    return extract_pattern("IRD", ird_layout(interp.index_spec, length), interp, target, length, source, ctx);
}

PatternWitness extract_ICT_pattern(const InterpretationMap& interp, const GenericModel& target, int length, const WitnessSource& source,
                                   const SearchContext& ctx) {
    return extract_pattern("ICT", ict_layout(interp.index_spec, length), interp, target, length, source, ctx);
}

PipelineResult quad_pattern_pipeline(const ClassSpec& k, bool ird, int length, int bound, std::uint64_t seed, const SearchContext& ctx) {
    PipelineResult res;
    res.construction = make_quad_construction(k, 2, "E", ctx);
    const QuadConstruction& q = res.construction;
    FiniteStructure a = ird ? IRD_source_structure(q.index, length) : ICT_source_structure(q.index, length);
    ClosureOptions opt;
    opt.seed = seed;
    opt.start = quad_r_graph(q, a);
    res.target = build_generic_model(spec_G(), 3, 4096, opt, ctx);
    if (res.target.capped) throw Error(ErrorCode::UnderCertifiedTarget, "seeded closure hit its size cap");
    auto cert = certify_embedding_size(res.target, q.n * bound, ctx);
    if (!cert.verified()) throw Error(ErrorCode::UnderCertifiedTarget, "seeded closure misses a graph on " + std::to_string(q.n * bound) + " points");
    WitnessSource source = quad_witness_source(q, res.target, ctx);
    res.configuration = verify_configuration(q.interpretation, res.target, bound, ctx, source);
    res.pattern = ird ? extract_IRD_pattern(q.interpretation, res.target, length, source, ctx)
                      : extract_ICT_pattern(q.interpretation, res.target, length, source, ctx);
    return res;
}

json DaggerReport::to_json() const {
    return {{"pair_types", pair_types},
            {"pair_types_reversed_reading", pair_types_reversed},
            {"unary_pair_types", unary_pair_types},
            {"count_ok", count_ok},
            {"claim", claim},
            {"claim_checked_to", 10},
            {"claim_ok", claim_ok},
            {"base_bound", base_bound},
            {"base_ok", base_ok},
            {"ok", ok()},
            {"note", note}};
}

DaggerReport verify_dagger_base_case(const GenericModel& model) {
    require_graph_target(model);
    DaggerReport rep;
    const FiniteStructure& s = model.structure;
    const int size = s.size();
    auto edge = [&](int x, int y) { return s.holds(0, Tuple{x, y}); };
    // Codes of (a, b) with both inner pairs of the same kind; key (inner, code).
    std::set<std::pair<int, BipartiteCode>> seen;
    for (int a0 = 0; a0 < size && seen.size() < 32; ++a0)
        for (int a1 = 0; a1 < size && seen.size() < 32; ++a1)
            for (int b0 = 0; b0 < size && seen.size() < 32; ++b0)
                for (int b1 = 0; b1 < size && seen.size() < 32; ++b1) {
                    if (a0 == a1 || a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 || b0 == b1) continue;
                    if (edge(a0, a1) != edge(b0, b1)) continue;
                    BipartiteCode g = 0;
                    const int av[2] = {a0, a1};
                    const int bv[2] = {b0, b1};
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j)
                            if (edge(av[i], bv[j])) g |= BipartiteCode{1} << (i * 2 + j);
                    seen.insert({edge(a0, a1) ? 1 : 0, g});
                }
    // (a, b) ~ (b, a) sends the code to its transpose; (a, b) ~ (b*, a*) to the anti-transpose.
    auto anti = [](BipartiteCode g) {
        BipartiteCode out = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (code_has(g, 2, i, j)) out |= BipartiteCode{1} << ((1 - j) * 2 + (1 - i));
        return out;
    };
    std::set<std::pair<int, BipartiteCode>> swap_classes, rev_classes;
    for (const auto& [inner, g] : seen) {
        swap_classes.insert({inner, std::min(g, code_star(g, 2))});
        rev_classes.insert({inner, std::min(g, anti(g))});
    }
    auto per_inner = [](const std::set<std::pair<int, BipartiteCode>>& classes) {
        std::size_t c0 = 0, c1 = 0;
        for (const auto& [inner, g] : classes) (inner ? c1 : c0)++;
        return c0 == c1 ? c0 : 0;
    };
    rep.pair_types = per_inner(swap_classes);
    rep.pair_types_reversed = per_inner(rev_classes);
    std::set<std::pair<bool, bool>> unary;
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) unary.insert({x == y, edge(x, y)});
    rep.unary_pair_types = unary.size();
    BipartiteCounts bc = bipartite_counts(2);
    BigInt expected = bc.symmetric + bc.nonsymmetric / 2;
    rep.count_ok = BigInt(rep.pair_types) == expected && rep.pair_types == rep.pair_types_reversed;

    rep.claim_ok = true;
    for (long n = 3; n <= 10; ++n) {
        BigInt lhs = pow2(n * n) - BigInt(n) * pow2(n * n - 2 * n);
        BigInt rhs = pow2(n * n - 1) + pow2(binom2(n + 1) - 1);
        bool holds = lhs > rhs;
        rep.claim_ok = rep.claim_ok && holds;
        rep.claim.push_back({{"n", n}, {"lhs", big_json(lhs)}, {"rhs", big_json(rhs)}, {"holds", holds}});
    }
    rep.base_bound = 16 - 3;
    rep.base_ok = rep.base_bound > static_cast<int>(rep.pair_types) && rep.pair_types == 12;
    rep.note = "|G^2| + 1/2 |G_ns^2| = " + big_json(bc.total + bc.nonsymmetric / 2).dump() +
               ", not 12; the count 12 is |G_s^2| + 1/2 |G_ns^2|";
    return rep;
}

json RankResult::to_json(bool with_certificate) const {
    json lo = {{"m", lower}, {"construction", lower_construction}, {"verdict", verdict_name(lower_report.verdict)}};
    if (with_certificate && certificate) lo["certificate"] = certificate_to_json(*certificate);
    json j = {{"class", class_name},
              {"n", n},
              {"lower", lo},
              {"upper", {{"m", upper.value}, {"justification", upper.justification}, {"details", upper.details}}}};
    j["exact"] = exact ? json(*exact) : json(nullptr);
    return j;
}

namespace {

struct LowerAttempt {
    std::string name;
    int m;
    InterpretationMap interp;
};

}  // namespace

RankResult compute_rank(const ClassSpec& k, int n, const GenericModel& target, int bound, const SearchContext& ctx) {
    require_single_binary(k);
    require_graph_target(target);
    RankResult rr;
    rr.class_name = k.name;
    rr.n = n;
    if (n == 1) {
        std::vector<LowerAttempt> attempts;
        if (k.signature == target.structure.signature()) attempts.push_back({"identity", 1, identity_configuration(k)});
        if (k.has(0, Property::Reflexive) && k.has(0, Property::Symmetric) && k.has(0, Property::Transitive)) {
            InterpretationMap im = identity_configuration(k);
            im.target_signature = target.structure.signature();
            const std::string& rel = target.structure.signature()[0].name;
            im.formulas[k.signature[0].name] = Formula::disj({Formula::equal(Term::at(0, 0), Term::at(1, 0)),
                                                              Formula::atom(rel, {Term::at(0, 0), Term::at(1, 0)})});
            attempts.push_back({"equality-or-edge", 1, im});
        }
        attempts.push_back({"trivial", 0, trivial_configuration(target.structure.signature(), 1)});
        for (const auto& at : attempts) {
            ConfigResult cr = verify_configuration(at.interp, target, bound, ctx);
            if (cr.certificate) {
                rr.lower = at.m;
                rr.lower_construction = at.name;
                rr.lower_report = cr.report;
                rr.certificate = std::move(cr.certificate);
                break;
            }
        }
    } else {
        QuadResult qr = build_quad_configuration(k, n, target, bound, ctx);
        rr.lower_report = qr.result.report;
        rr.lower_construction = "quadratic";
        if (qr.result.certificate) {
            rr.lower = qr.construction.m;
            rr.certificate = std::move(qr.result.certificate);
        }
    }

    const bool equivalence = k.has(0, Property::Reflexive) && k.has(0, Property::Symmetric) && k.has(0, Property::Transitive);
    if (equivalence && !self_similar_cached(k, ctx)) {
        if (n == 1) {
            DaggerReport d = verify_dagger_base_case(target);
            const std::size_t s2 = s2_count(k, 2, ctx);
            rr.upper.value = 1;
            rr.upper.justification = "dagger-base-n1";
            rr.upper.details = {{"unary_pair_types", d.unary_pair_types},
                                {"s2_next", s2},
                                {"holds", d.unary_pair_types < s2},
                                {"inequality", "2-types of single points < |S_2(E^{*2})|"}};
            if (d.unary_pair_types >= s2) throw Error(ErrorCode::HypothesisUnmet, "single-point type count does not separate E^{*2}");
        } else if (n == 2) {
            DaggerReport d = verify_dagger_base_case(target);
            rr.upper.value = 3;
            rr.upper.justification = "dagger-base-n2";
            rr.upper.details = d.to_json();
            if (!d.ok()) throw Error(ErrorCode::HypothesisUnmet, "dagger base-case arithmetic failed");
        } else {
            throw Error(ErrorCode::HypothesisUnmet, k.name + " has no counting upper bound beyond n = 2 here");
        }
    } else {
        rr.upper = counting_upper_bound(k, n, ctx);
    }
    if (rr.lower == rr.upper.value) rr.exact = rr.lower;
    return rr;
}

std::vector<RankResult> compute_rank_table(const ClassSpec& k, int n_max, const GenericModel& target, int bound, const SearchContext& ctx) {
    std::vector<RankResult> out;
    for (int n = 1; n <= n_max; ++n) out.push_back(compute_rank(k, n, target, bound, ctx));
    return out;
}

GenericModel standard_graph_target(std::uint64_t seed, const SearchContext& ctx) {
    ClosureOptions opt;
    opt.seed = seed;
    GenericModel g = build_generic_model(spec_G(), 3, 4096, opt, ctx);
    if (g.capped) throw Error(ErrorCode::UnderCertifiedTarget, "generic graph closure hit its cap");
    if (!certify_embedding_size(g, 6, ctx).verified()) throw Error(ErrorCode::UnderCertifiedTarget, "generic graph misses a 6-point graph");
    return g;
}

}  // namespace fraisse
