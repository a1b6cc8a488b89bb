#include "fraisse/completion.hpp"

#include <algorithm>

#include "fraisse/error.hpp"

namespace fraisse {

PartialStructure::PartialStructure(Signature signature, int size) : signature_(std::move(signature)), size_(size) {
    for (const auto& r : signature_) {
        std::size_t total = 1;
        for (int i = 0; i < r.arity; ++i) total *= static_cast<std::size_t>(size);
        values_.emplace_back(total, std::int8_t{-1});
    }
}

PartialStructure::PartialStructure(const FiniteStructure& s) : PartialStructure(s.signature(), s.size()) {
    for (std::size_t r = 0; r < signature_.size(); ++r)
        for (std::size_t i = 0; i < values_[r].size(); ++i) values_[r][i] = s.holds_at(r, i) ? 1 : 0;
}

PartialStructure PartialStructure::extend(const FiniteStructure& base, int extra) {
    PartialStructure p(base.signature(), base.size() + extra);
    for (std::size_t r = 0; r < base.signature().size(); ++r) {
        int arity = base.signature()[r].arity;
        for (std::size_t i = 0; i < base.table_size(r); ++i) {
            Tuple t = decode_tuple(i, base.size(), arity);
            p.set(r, t, base.holds_at(r, i));
        }
    }
    return p;
}

std::size_t PartialStructure::index(std::size_t rel, const int* entries) const {
    std::size_t idx = 0;
    for (int i = 0; i < signature_[rel].arity; ++i) idx = idx * static_cast<std::size_t>(size_) + static_cast<std::size_t>(entries[i]);
    return idx;
}

bool PartialStructure::fix(std::size_t rel, const Tuple& t, bool v) {
    auto& cell = values_[rel][index(rel, t)];
    std::int8_t want = v ? 1 : 0;
    if (cell >= 0 && cell != want) return false;
    cell = want;
    return true;
}

FiniteStructure PartialStructure::to_structure() const {
    FiniteStructure s(signature_, size_);
    for (std::size_t r = 0; r < signature_.size(); ++r)
        for (std::size_t i = 0; i < values_[r].size(); ++i) s.set_at(r, i, values_[r][i] == 1);
    return s;
}

namespace {

struct Cell {
    std::size_t rel;
    std::size_t idx;
    Tuple tuple;
};

class Solver {
public:
    Solver(const ClassSpec& spec, PartialStructure partial, const CompletionOptions& options)
        : spec_(spec), p_(std::move(partial)), opt_(options) {}

    std::size_t run(const std::function<bool(const FiniteStructure&)>& visit) {
        if (p_.signature() != spec_.signature) throw Error(ErrorCode::SignatureMismatch, "partial structure over wrong signature");
        const int n = p_.size();
        for (std::size_t r = 0; r < p_.signature().size(); ++r) {
            int arity = p_.signature()[r].arity;
            for (std::size_t i = 0; i < p_.table_size(r); ++i) {
                if (p_.get(r, i) >= 0) {
                    if (opt_.check_fixed && !local_ok(r, decode_tuple(i, n, arity))) return 0;
                    continue;
                }
                cells_.push_back({r, i, decode_tuple(i, n, arity)});
            }
        }
        visit_ = &visit;
        dfs(0);
        return visited_;
    }

private:
    std::int8_t val(std::size_t rel, const Tuple& t) const { return p_.get(rel, t); }

    bool local_ok(std::size_t rel, const Tuple& t) {
        const PropertySet props = spec_.properties[rel];
        const std::int8_t v = val(rel, t);
        const int arity = static_cast<int>(t.size());
        bool all_equal = std::all_of(t.begin(), t.end(), [&](int e) { return e == t[0]; });
        bool distinct = true;
        for (int i = 0; i < arity && distinct; ++i)
            for (int j = i + 1; j < arity; ++j)
                if (t[static_cast<std::size_t>(i)] == t[static_cast<std::size_t>(j)]) distinct = false;
        if ((props & bit(Property::Irreflexive)) && !distinct && v == 1) return false;
        if ((props & bit(Property::Reflexive)) && all_equal && v == 0) return false;
        if (props & (bit(Property::Symmetric) | bit(Property::Trichotomous))) {
            const auto& perms = permutations_of(arity);
            int ones = 0;
            int unknown = 0;
            perm_.resize(t.size());
            for (const auto& sigma : perms) {
                for (int k = 0; k < arity; ++k) perm_[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(sigma[static_cast<std::size_t>(k)])];
                std::int8_t u = val(rel, perm_);
                if ((props & bit(Property::Symmetric)) && u >= 0 && u != v) return false;
                if (u < 0) ++unknown;
                if (u == 1) ++ones;
            }
            if ((props & bit(Property::Trichotomous)) && distinct) {
                // Each distinct permutation of a distinct-entry tuple appears once in perms.
                if (ones > 1) return false;
                if (unknown == 0 && ones != 1) return false;
            }
        }
        if ((props & bit(Property::Transitive)) && arity == 2) {
            const int a = t[0];
            const int b = t[1];
            const int n = p_.size();
            Tuple x(2), y(2);
            for (int c = 0; c < n; ++c) {
                if (v == 1) {
                    x = {b, c};
                    y = {a, c};
                    if (val(rel, x) == 1 && val(rel, y) == 0) return false;
                    x = {c, a};
                    y = {c, b};
                    if (val(rel, x) == 1 && val(rel, y) == 0) return false;
                } else if (v == 0) {
                    x = {a, c};
                    y = {c, b};
                    if (val(rel, x) == 1 && val(rel, y) == 1) return false;
                }
            }
        }
        return true;
    }

    bool dfs(std::size_t k) {
        opt_.ctx.charge();
        if (k == cells_.size()) {
            FiniteStructure s = p_.to_structure();
            for (const auto& c : spec_.customs)
                if (!c.accepts(reduct(s, c.over))) return false;
            ++visited_;
            return !(*visit_)(s);
        }
        const Cell& cell = cells_[k];
        std::int8_t first = 0;
        if (opt_.rng) first = static_cast<std::int8_t>((*opt_.rng)() & 1u);
        for (std::int8_t offset = 0; offset < 2; ++offset) {
            std::int8_t v = static_cast<std::int8_t>(first ^ offset);
            p_.set(cell.rel, cell.idx, v);
            if (local_ok(cell.rel, cell.tuple) && dfs(k + 1)) {
                p_.set(cell.rel, cell.idx, -1);
                return true;
            }
        }
        p_.set(cell.rel, cell.idx, -1);
        return false;
    }

    const ClassSpec& spec_;
    PartialStructure p_;
    const CompletionOptions& opt_;
    std::vector<Cell> cells_;
    Tuple perm_;
    const std::function<bool(const FiniteStructure&)>* visit_ = nullptr;
    std::size_t visited_ = 0;
};

}  // namespace

std::size_t complete_members(const ClassSpec& spec, const PartialStructure& partial,
                             const std::function<bool(const FiniteStructure&)>& visit, const CompletionOptions& options) {
    Solver solver(spec, partial, options);
    return solver.run(visit);
}

std::optional<FiniteStructure> first_completion(const ClassSpec& spec, const PartialStructure& partial,
                                                const CompletionOptions& options) {
    std::optional<FiniteStructure> out;
    complete_members(spec, partial, [&](const FiniteStructure& s) {
        out = s;
        return false;
    }, options);
    return out;
}

std::vector<FiniteStructure> labeled_members(const ClassSpec& spec, int n, const SearchContext& ctx) {
    std::vector<FiniteStructure> out;
    CompletionOptions opt;
    opt.ctx = ctx;
    complete_members(spec, PartialStructure(spec.signature, n), [&](const FiniteStructure& s) {
        out.push_back(s);
        return true;
    }, opt);
    return out;
}

std::vector<FiniteStructure> one_point_extensions(const ClassSpec& spec, const FiniteStructure& base, const SearchContext& ctx) {
    std::vector<FiniteStructure> out;
    CompletionOptions opt;
    opt.ctx = ctx;
    opt.check_fixed = false;
    complete_members(spec, PartialStructure::extend(base, 1), [&](const FiniteStructure& s) {
        out.push_back(s);
        return true;
    }, opt);
    return out;
}

}  // namespace fraisse
