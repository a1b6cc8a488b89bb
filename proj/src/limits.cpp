#include "fraisse/limits.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <unordered_set>

#include "fraisse/classes.hpp"
#include "fraisse/completion.hpp"
#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"

namespace fraisse {

std::vector<int> box_coordinates(int point, int m, int n) {
    std::vector<int> c(static_cast<std::size_t>(m + 1));
    for (int i = m; i >= 0; --i) {
        c[static_cast<std::size_t>(i)] = point % n;
        point /= n;
    }
    return c;
}

int box_point(const std::vector<int>& coords, int n) {
    int p = 0;
    for (int c : coords) p = p * n + c;
    return p;
}

GenericModel build_box_model(int m, int n, const SearchContext& ctx) {
    if (m < 1 || n < 1) throw Error(ErrorCode::OutOfRange, "box model needs m >= 1 and n >= 1");
    std::uint64_t total = 1;
    for (int i = 0; i <= m; ++i) {
        total *= static_cast<std::uint64_t>(n);
        if (total > 4096) throw Error(ErrorCode::BoundExceeded, "box model n^(m+1) exceeds 4096 points");
    }
    ctx.charge(total * total);
    GenericModel model;
    model.spec = power(spec_E(), m);
    const int size = static_cast<int>(total);
    model.structure = FiniteStructure(model.spec.signature, size);
    std::vector<std::vector<int>> coords;
    for (int p = 0; p < size; ++p) coords.push_back(box_coordinates(p, m, n));
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < size; ++a)
            for (int b = 0; b < size; ++b)
                if (coords[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] == coords[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)])
                    model.structure.set(static_cast<std::size_t>(i), {a, b});
    model.certified_level = n - 1;
    model.embedding_size = n;
    return model;
}

namespace {

// Atom tuples over positions 0..d where position d is the new point; only
// tuples mentioning d, grouped by relation.
struct AtomPlan {
    std::vector<std::pair<std::size_t, Tuple>> atoms;
};

AtomPlan atom_plan(const Signature& sig, int d) {
    AtomPlan plan;
    for (std::size_t r = 0; r < sig.size(); ++r) {
        const int arity = sig[r].arity;
        std::size_t total = 1;
        for (int i = 0; i < arity; ++i) total *= static_cast<std::size_t>(d + 1);
        for (std::size_t idx = 0; idx < total; ++idx) {
            Tuple t = decode_tuple(idx, d + 1, arity);
            if (std::find(t.begin(), t.end(), d) != t.end()) plan.atoms.emplace_back(r, t);
        }
    }
    if (plan.atoms.size() > 64) throw Error(ErrorCode::BoundExceeded, "one-point types over " + std::to_string(d) + " points exceed 64 atoms");
    return plan;
}

// Key of the type of point u over D (D listed in position order).
std::uint64_t type_key(const FiniteStructure& s, const AtomPlan& plan, const std::vector<int>& d, int u, Tuple& buf) {
    std::uint64_t key = 0;
    std::size_t bitpos = 0;
    for (const auto& [r, t] : plan.atoms) {
        buf.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) buf[i] = t[i] == static_cast<int>(d.size()) ? u : d[static_cast<std::size_t>(t[i])];
        if (s.holds(r, buf.data())) key |= std::uint64_t{1} << bitpos;
        ++bitpos;
    }
    return key;
}

struct TypeInfo {
    std::uint64_t key;
    FiniteStructure type;
};

class TypeCache {
public:
    TypeCache(const ClassSpec& spec, const SearchContext& ctx) : spec_(spec), ctx_(ctx) {}

    const AtomPlan& plan(int d) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(d);
        if (it == plans_.end()) it = plans_.emplace(d, atom_plan(spec_.signature, d)).first;
        return it->second;
    }

    const std::vector<TypeInfo>& types(const FiniteStructure& over) {
        auto enc = over.encoding();
        enc.push_back(static_cast<std::uint8_t>(over.size()));
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = types_.find(enc);
            if (it != types_.end()) return it->second;
        }
        const AtomPlan& pl = plan(over.size());
        std::vector<int> ident(static_cast<std::size_t>(over.size()));
        for (int i = 0; i < over.size(); ++i) ident[static_cast<std::size_t>(i)] = i;
        std::vector<TypeInfo> out;
        Tuple buf;
        for (auto& ext : one_point_extensions(spec_, over, ctx_)) {
            std::uint64_t key = type_key(ext, pl, ident, over.size(), buf);
            out.push_back({key, std::move(ext)});
        }
        std::lock_guard<std::mutex> lock(mu_);
        return types_.emplace(std::move(enc), std::move(out)).first->second;
    }

private:
    const ClassSpec& spec_;
    SearchContext ctx_;
    std::mutex mu_;
    std::map<int, AtomPlan> plans_;
    std::map<std::vector<std::uint8_t>, std::vector<TypeInfo>> types_;
};

// Lexicographic enumeration of subsets of {0..limit-1} with at most max_size elements.
void for_each_subset(int limit, int max_size, const std::function<void(const std::vector<int>&)>& body) {
    if (max_size < 0) return;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        body(cur);
        if (static_cast<int>(cur.size()) >= max_size) return;
        for (int v = start; v < limit; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

bool in_set(const std::vector<int>& d, int u) { return std::find(d.begin(), d.end(), u) != d.end(); }

}  // namespace

GenericModel build_generic_model(const ClassSpec& spec, int level, int size_cap, const ClosureOptions& options,
                                 const SearchContext& ctx) {
    if (!spec.binary()) throw Error(ErrorCode::NonBinarySignature, "closure needs a binary signature, got " + spec.name);
    if (level < 0) throw Error(ErrorCode::OutOfRange, "negative extension level");
    if (options.check_precondition) {
        auto rep = verify_class_axioms(spec, level + 1, Axiom::StrongAmalgamation, ctx);
        if (!rep.verified())
            throw Error(ErrorCode::NotAmalgamation, spec.name + " fails strong amalgamation at bound " + std::to_string(level + 1));
    }
    GenericModel model;
    model.spec = spec;
    model.structure = options.start ? *options.start : FiniteStructure(spec.signature, 0);
    if (model.structure.signature() != spec.signature) throw Error(ErrorCode::SignatureMismatch, "seed structure over wrong signature");
    if (!spec.contains(model.structure)) throw Error(ErrorCode::OutOfRange, "seed structure is not a member of " + spec.name);

    std::mt19937_64 rng(options.seed);
    TypeCache cache(spec, ctx);
    Tuple buf;
    bool capped = false;

    auto process = [&](const std::vector<int>& d) {
        FiniteStructure& s = model.structure;
        const AtomPlan& pl = cache.plan(static_cast<int>(d.size()));
        const auto& types = cache.types(pullback(s, d));
        std::unordered_set<std::uint64_t> realized;
        for (int u = 0; u < s.size(); ++u)
            if (!in_set(d, u)) realized.insert(type_key(s, pl, d, u, buf));
        for (const auto& t : types) {
            if (realized.count(t.key)) continue;
            if (s.size() >= size_cap) {
                capped = true;
                return;
            }
            PartialStructure partial = PartialStructure::extend(s, 1);
            const int fresh = s.size();
            for (const auto& [r, at] : pl.atoms) {
                Tuple mapped(at.size());
                for (std::size_t i = 0; i < at.size(); ++i)
                    mapped[i] = at[i] == static_cast<int>(d.size()) ? fresh : d[static_cast<std::size_t>(at[i])];
                partial.set(r, mapped, t.type.holds(r, at));
            }
            CompletionOptions opt;
            opt.check_fixed = false;
            opt.rng = &rng;
            opt.ctx = ctx;
            auto next = first_completion(spec, partial, opt);
            if (!next) throw Error(ErrorCode::NotAmalgamation, "no member realizes a required one-point extension of " + spec.name);
            s = std::move(*next);
            realized.insert(t.key);
        }
    };

    process({});
    for (int v = 0; !capped && v < model.structure.size(); ++v) {
        for_each_subset(v, level - 1, [&](const std::vector<int>& prefix) {
            if (capped) return;
            std::vector<int> d = prefix;
            d.push_back(v);
            process(d);
        });
    }
    model.capped = capped;
    model.certified_level = capped ? -1 : level;
    model.embedding_size = capped ? 0 : level + 1;
    return model;
}

GenericModel build_product_order_model(int k, int side) {
    if (k < 1 || side < 1) throw Error(ErrorCode::OutOfRange, "product order model needs k >= 1 and side >= 1");
    std::uint64_t total = 1;
    for (int i = 0; i < k; ++i) {
        total *= static_cast<std::uint64_t>(side);
        if (total > 4096) throw Error(ErrorCode::BoundExceeded, "product order model exceeds 4096 points");
    }
    GenericModel model;
    model.spec = power(spec_LO(), k);
    const int size = static_cast<int>(total);
    model.structure = FiniteStructure(model.spec.signature, size);
    std::vector<std::vector<int>> coords;
    for (int p = 0; p < size; ++p) {
        std::vector<int> c(static_cast<std::size_t>(k));
        int q = p;
        for (int i = k - 1; i >= 0; --i) {
            c[static_cast<std::size_t>(i)] = q % side;
            q /= side;
        }
        coords.push_back(c);
    }
    for (int i = 0; i < k; ++i) {
        for (int a = 0; a < size; ++a) {
            for (int b = 0; b < size; ++b) {
                const auto& g = coords[static_cast<std::size_t>(a)];
                const auto& h = coords[static_cast<std::size_t>(b)];
                const auto ii = static_cast<std::size_t>(i);
                bool less = g[ii] < h[ii] || (g[ii] == h[ii] && g < h);
                if (less) model.structure.set(ii, {a, b});
            }
        }
    }
    // A finite order never has the one-point extension property, but any
    // member with at most `side` points embeds through its rank vectors.
    model.certified_level = 0;
    model.embedding_size = side;
    return model;
}

VerificationReport check_extension_property(const GenericModel& model, int level, const SearchContext& ctx) {
    VerificationReport rep;
    rep.check = "extension-property";
    rep.bound = level;
    const FiniteStructure& s = model.structure;
    if (s.signature() != model.spec.signature) throw Error(ErrorCode::SignatureMismatch, "model structure does not match its spec");
    if (!model.spec.contains(s)) {
        rep.verdict = Verdict::Refuted;
        rep.message = "model is not a member of " + model.spec.name;
        return rep;
    }
    TypeCache cache(model.spec, ctx);
    // Bucket 0 holds D = {}; bucket v + 1 the subsets with largest point v.
    const std::size_t buckets = static_cast<std::size_t>(s.size()) + 1;
    std::vector<std::uint64_t> counts(buckets, 0);
    std::vector<std::optional<json>> failures(buckets);
    parallel_for(ctx.jobs, buckets, [&](std::size_t b) {
        Tuple buf;
        auto check = [&](const std::vector<int>& d) {
            const AtomPlan& pl = cache.plan(static_cast<int>(d.size()));
            const auto& types = cache.types(pullback(s, d));
            std::unordered_set<std::uint64_t> realized;
            for (int u = 0; u < s.size(); ++u)
                if (!in_set(d, u)) realized.insert(type_key(s, pl, d, u, buf));
            for (const auto& t : types) {
                ++counts[b];
                ctx.charge();
                if (!realized.count(t.key) && !failures[b]) failures[b] = json{{"D", d}, {"type", structure_to_json(t.type)}};
            }
        };
        if (b == 0) {
            if (level >= 0) check({});
            return;
        }
        const int v = static_cast<int>(b) - 1;
        for_each_subset(v, level - 1, [&](const std::vector<int>& prefix) {
            std::vector<int> d = prefix;
            d.push_back(v);
            check(d);
        });
    });
    for (auto c : counts) rep.instances += c;
    for (const auto& f : failures) {
        if (f) {
            rep.verdict = Verdict::Refuted;
            rep.witness = *f;
            rep.message = "one-point type over D is not realized";
            break;
        }
    }
    return rep;
}

VerificationReport certify_embedding_size(GenericModel& model, int size, const SearchContext& ctx) {
    VerificationReport rep;
    rep.check = "embedding-size";
    rep.bound = size;
    auto members = enumerate_up_to(model.spec, size, ctx);
    rep.instances = members.size();
    std::vector<char> ok(members.size(), 0);
    parallel_for(ctx.jobs, members.size(), [&](std::size_t i) {
        ok[i] = find_first_embedding(members[i], model.structure, ctx).has_value() ? 1 : 0;
    });
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!ok[i]) {
            rep.verdict = Verdict::Refuted;
            rep.witness = structure_to_json(members[i]);
            rep.message = "member does not embed into the model";
            return rep;
        }
    }
    model.embedding_size = std::max(model.embedding_size, size);
    return rep;
}

std::size_t count_nonequality_pair_types(const FiniteStructure& s) {
    std::set<std::vector<std::uint8_t>> seen;
    std::vector<std::uint8_t> key;
    Tuple buf;
    for (int a = 0; a < s.size(); ++a) {
        for (int b = 0; b < s.size(); ++b) {
            if (a == b) continue;
            key.clear();
            for (std::size_t r = 0; r < s.signature().size(); ++r) {
                const int arity = s.signature()[r].arity;
                const std::size_t total = std::size_t{1} << arity;
                buf.resize(static_cast<std::size_t>(arity));
                for (std::size_t m = 0; m < total; ++m) {
                    for (int i = 0; i < arity; ++i) buf[static_cast<std::size_t>(i)] = ((m >> (arity - 1 - i)) & 1u) ? b : a;
                    key.push_back(s.holds(r, buf) ? 1 : 0);
                }
            }
            seen.insert(key);
        }
    }
    return seen.size();
}

json model_to_json(const GenericModel& model) {
    json j = structure_to_json(model.structure);
    j["certified_level"] = model.certified_level;
    j["embedding_size"] = model.embedding_size;
    j["spec"] = model.spec.name;
    if (model.capped) j["capped"] = true;
    return j;
}

GenericModel model_from_json(const json& j) {
    GenericModel model;
    if (!j.contains("spec")) throw Error(ErrorCode::Parse, "model JSON lacks \"spec\"");
    model.spec = parse_class(j.at("spec").get<std::string>());
    model.structure = structure_from_json(j);
    if (model.structure.signature() != model.spec.signature)
        throw Error(ErrorCode::SignatureMismatch, "model signature does not match spec " + model.spec.name);
    model.certified_level = j.value("certified_level", -1);
    model.embedding_size = j.value("embedding_size", model.certified_level + 1);
    model.capped = j.value("capped", false);
    return model;
}

}  // namespace fraisse
