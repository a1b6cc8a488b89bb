#include "fraisse/config.hpp"

#include <algorithm>

#include "fraisse/completion.hpp"
#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"

namespace fraisse {

const Formula& InterpretationMap::formula(const std::string& relation) const {
    auto it = formulas.find(relation);
    if (it == formulas.end()) throw Error(ErrorCode::UnknownRelation, "no formula for index relation '" + relation + "'");
    return it->second;
}

void InterpretationMap::validate() const {
    if (tuple_length < 0) throw Error(ErrorCode::OutOfRange, "negative tuple length");
    for (const auto& [name, f] : formulas)
        if (!index_spec.signature.contains(name)) throw Error(ErrorCode::UnknownRelation, "formula for '" + name + "' which is not an index relation");
    for (const auto& r : index_spec.signature) {
        const Formula& f = formula(r.name);
        bind(f, target_signature);
        if (max_slot(f) >= r.arity) throw Error(ErrorCode::OutOfRange, "formula for '" + r.name + "' uses a slot beyond its arity");
        if (max_coord(f) >= tuple_length) throw Error(ErrorCode::OutOfRange, "formula for '" + r.name + "' uses a coordinate beyond the tuple length");
        if (max_param(f) >= static_cast<int>(parameters.size()))
            throw Error(ErrorCode::OutOfRange, "formula for '" + r.name + "' uses an undeclared parameter");
    }
}

namespace {

std::vector<Formula> bound_formulas(const InterpretationMap& interp) {
    std::vector<Formula> out;
    for (const auto& r : interp.index_spec.signature) out.push_back(bind(interp.formula(r.name), interp.target_signature));
    return out;
}

std::size_t tuple_count(int n, int arity) {
    std::size_t total = 1;
    for (int i = 0; i < arity; ++i) total *= static_cast<std::size_t>(n);
    return total;
}

bool holds_for(const Formula& f, const FiniteStructure& target, const Witness& w, const Tuple& t, const std::vector<int>& params) {
    Valuation v;
    v.params = params.data();
    for (int e : t) v.slots.push_back(w[static_cast<std::size_t>(e)].data());
    return evaluate(f, target, v);
}

}  // namespace

bool witness_valid(const InterpretationMap& interp, const FiniteStructure& target, const FiniteStructure& a, const Witness& w) {
    if (static_cast<int>(w.size()) != a.size()) return false;
    for (const auto& t : w) {
        if (static_cast<int>(t.size()) != interp.tuple_length) return false;
        for (int e : t)
            if (e < 0 || e >= target.size()) return false;
    }
    for (int p : interp.parameters)
        if (p < 0 || p >= target.size()) return false;
    Witness sorted = w;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    const auto formulas = bound_formulas(interp);
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        const int arity = a.signature()[r].arity;
        for (std::size_t idx = 0; idx < a.table_size(r); ++idx) {
            Tuple t = decode_tuple(idx, a.size(), arity);
            if (holds_for(formulas[r], target, w, t, interp.parameters) != a.holds_at(r, idx)) return false;
        }
    }
    return true;
}

std::optional<Witness> find_witness(const InterpretationMap& interp, const FiniteStructure& target, const FiniteStructure& a,
                                    const SearchContext& ctx) {
    if (a.signature() != interp.index_spec.signature) throw Error(ErrorCode::SignatureMismatch, "structure is not over the index signature");
    const int n = interp.tuple_length;
    const int size = a.size();
    if (size == 0) return Witness{};
    const auto formulas = bound_formulas(interp);
    const std::size_t total = tuple_count(target.size(), n);
    if (total > (std::size_t{1} << 22)) throw Error(ErrorCode::BoundExceeded, "too many target tuples to search");
    const auto nu = static_cast<std::size_t>(n);
    std::vector<int> flat(total * nu);
    for (std::size_t c = 0; c < total; ++c) {
        Tuple t = decode_tuple(c, target.size(), n);
        std::copy(t.begin(), t.end(), flat.begin() + static_cast<std::ptrdiff_t>(c * nu));
    }
    const Signature& sig = a.signature();

    // Diagonal prefilter: candidates for a point depend only on which R(a,...,a) hold.
    std::map<std::vector<bool>, std::vector<std::size_t>> by_pattern;
    std::vector<const std::vector<std::size_t>*> cand(static_cast<std::size_t>(size));
    for (int p = 0; p < size; ++p) {
        std::vector<bool> pattern;
        for (std::size_t r = 0; r < sig.size(); ++r) pattern.push_back(a.holds(r, Tuple(static_cast<std::size_t>(sig[r].arity), p)));
        auto it = by_pattern.find(pattern);
        if (it == by_pattern.end()) {
            std::vector<std::size_t> list;
            for (std::size_t c = 0; c < total; ++c) {
                Valuation v;
                v.params = interp.parameters.data();
                bool ok = true;
                for (std::size_t r = 0; r < sig.size() && ok; ++r) {
                    v.slots.assign(static_cast<std::size_t>(sig[r].arity), flat.data() + c * nu);
                    ok = evaluate(formulas[r], target, v) == pattern[r];
                }
                if (ok) list.push_back(c);
            }
            it = by_pattern.emplace(pattern, std::move(list)).first;
        }
        cand[static_cast<std::size_t>(p)] = &it->second;
    }

    // checks[k]: non-diagonal tuples whose largest entry is k.
    std::vector<std::vector<std::pair<std::size_t, Tuple>>> checks(static_cast<std::size_t>(size));
    for (std::size_t r = 0; r < sig.size(); ++r) {
        const int arity = sig[r].arity;
        for (std::size_t idx = 0; idx < a.table_size(r); ++idx) {
            Tuple t = decode_tuple(idx, size, arity);
            int mx = *std::max_element(t.begin(), t.end());
            bool diag = std::all_of(t.begin(), t.end(), [&](int e) { return e == t[0]; });
            if (!diag) checks[static_cast<std::size_t>(mx)].emplace_back(r, t);
        }
    }

    std::vector<std::size_t> chosen(static_cast<std::size_t>(size));
    Valuation v;
    v.params = interp.parameters.data();
    std::function<bool(int)> dfs = [&](int k) -> bool {
        if (k == size) return true;
        const auto ku = static_cast<std::size_t>(k);
        for (std::size_t c : *cand[ku]) {
            ctx.charge();
            if (std::find(chosen.begin(), chosen.begin() + k, c) != chosen.begin() + k) continue;
            chosen[ku] = c;
            bool ok = true;
            for (const auto& [r, t] : checks[ku]) {
                v.slots.clear();
                for (int e : t) v.slots.push_back(flat.data() + chosen[static_cast<std::size_t>(e)] * nu);
                if (evaluate(formulas[r], target, v) != a.holds(r, t)) {
                    ok = false;
                    break;
                }
            }
            if (ok && dfs(k + 1)) return true;
        }
        return false;
    };
    if (!dfs(0)) return std::nullopt;
    Witness w;
    for (int p = 0; p < size; ++p) {
        const int* t = flat.data() + chosen[static_cast<std::size_t>(p)] * nu;
        w.emplace_back(t, t + n);
    }
    return w;
}

std::optional<Witness> ConfigCertificate::witness_for(const FiniteStructure& a) const {
    std::vector<int> sigma;
    FiniteStructure c = canonical_form(a, sigma);
    for (std::size_t i = 0; i < structures.size(); ++i) {
        if (structures[i] == c) {
            Witness w(static_cast<std::size_t>(a.size()));
            for (int x = 0; x < a.size(); ++x) w[static_cast<std::size_t>(x)] = witnesses[i][static_cast<std::size_t>(sigma[static_cast<std::size_t>(x)])];
            return w;
        }
    }
    return std::nullopt;
}

ConfigResult verify_configuration(const InterpretationMap& interp, const GenericModel& target, int size_bound,
                                  const SearchContext& ctx, const WitnessSource& source) {
    interp.validate();
    if (interp.target_signature != target.structure.signature())
        throw Error(ErrorCode::SignatureMismatch, "interpretation target signature differs from the model's");
    if (size_bound < 1) throw Error(ErrorCode::OutOfRange, "size bound must be at least 1");
    for (int p : interp.parameters)
        if (p < 0 || p >= target.structure.size()) throw Error(ErrorCode::OutOfRange, "parameter outside the target universe");

    ConfigResult result;
    VerificationReport& rep = result.report;
    rep.check = "configuration";
    rep.bound = size_bound;
    auto members = enumerate_up_to(interp.index_spec, size_bound, ctx);
    rep.instances = members.size();
    std::vector<std::optional<Witness>> found(members.size());
    parallel_for(ctx.jobs, members.size(), [&](std::size_t i) {
        if (source) {
            auto w = source(members[i]);
            if (w && witness_valid(interp, target.structure, members[i], *w)) {
                found[i] = std::move(w);
                return;
            }
        }
        auto w = find_witness(interp, target.structure, members[i], ctx);
        if (w && witness_valid(interp, target.structure, members[i], *w)) found[i] = std::move(w);
    });
    const int params = static_cast<int>(interp.parameters.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (found[i]) continue;
        const int needed = interp.tuple_length * members[i].size() + params;
        const bool conclusive = target.embedding_size >= needed && (params == 0 || target.certified_level >= needed - 1);
        rep.verdict = conclusive ? Verdict::Refuted : Verdict::Inconclusive;
        rep.witness = {{"A", structure_to_json(members[i])},
                       {"points_needed", needed},
                       {"embedding_size", target.embedding_size},
                       {"certified_level", target.certified_level}};
        rep.message = conclusive ? "no witness for A in the target" : "no witness for A, but the target is under-certified for this size";
        return result;
    }
    ConfigCertificate cert;
    cert.interpretation = interp;
    cert.target = target;
    cert.size_bound = size_bound;
    cert.points_needed = interp.tuple_length * size_bound + params;
    cert.structures = std::move(members);
    for (auto& w : found) cert.witnesses.push_back(std::move(*w));
    result.certificate = std::move(cert);
    return result;
}

bool recheck_certificate(const ConfigCertificate& cert) {
    if (cert.structures.size() != cert.witnesses.size()) return false;
    auto members = enumerate_up_to(cert.interpretation.index_spec, cert.size_bound);
    if (members != cert.structures) return false;
    for (std::size_t i = 0; i < cert.structures.size(); ++i)
        if (!witness_valid(cert.interpretation, cert.target.structure, cert.structures[i], cert.witnesses[i])) return false;
    return true;
}

InterpretationMap identity_configuration(const ClassSpec& k) {
    InterpretationMap m;
    m.index_spec = k;
    m.target_signature = k.signature;
    m.tuple_length = 1;
    for (const auto& r : k.signature) {
        std::vector<Term> args;
        for (int s = 0; s < r.arity; ++s) args.push_back(Term::at(s, 0));
        m.formulas[r.name] = Formula::atom(r.name, args);
    }
    return m;
}

InterpretationMap trivial_configuration(const Signature& target_signature, int tuple_length) {
    InterpretationMap m;
    m.index_spec = spec_S();
    m.target_signature = target_signature;
    m.tuple_length = tuple_length;
    return m;
}

InterpretationMap pad_configuration(const InterpretationMap& interp, int extra) {
    if (extra < 0) throw Error(ErrorCode::OutOfRange, "negative padding");
    InterpretationMap m = interp;
    m.tuple_length += extra;
    return m;
}

Witness pad_witness(const Witness& w, int extra) {
    Witness out = w;
    for (auto& t : out) {
        const int fill = t.empty() ? 0 : t.front();
        t.insert(t.end(), static_cast<std::size_t>(extra), fill);
    }
    return out;
}

InterpretationMap make_parameter_free(const InterpretationMap& interp) {
    if (interp.parameter_free()) return interp;
    InterpretationMap m = interp;
    const int n = interp.tuple_length;
    for (auto& [name, f] : m.formulas)
        f = map_terms(f, [&](const Term& t) { return t.is_param ? Term::at(0, n + t.param) : t; });
    m.tuple_length = n + static_cast<int>(interp.parameters.size());
    m.parameters.clear();
    return m;
}

Witness parameter_free_witness(const InterpretationMap& original, const Witness& w) {
    Witness out = w;
    for (auto& t : out) t.insert(t.end(), original.parameters.begin(), original.parameters.end());
    return out;
}

ConfigCertificate make_parameter_free(const ConfigCertificate& cert) {
    ConfigCertificate out = cert;
    out.interpretation = make_parameter_free(cert.interpretation);
    for (auto& w : out.witnesses) w = parameter_free_witness(cert.interpretation, w);
    return out;
}

InterpretationMap product_configuration(const InterpretationMap& i0, const InterpretationMap& i1) {
    if (i0.target_signature != i1.target_signature) throw Error(ErrorCode::SignatureMismatch, "product factors interpret into different signatures");
    InterpretationMap m;
    m.index_spec = superpose(i0.index_spec, i1.index_spec);
    m.target_signature = i0.target_signature;
    m.tuple_length = i0.tuple_length + i1.tuple_length;
    m.parameters = i0.parameters;
    m.parameters.insert(m.parameters.end(), i1.parameters.begin(), i1.parameters.end());
    const std::size_t s0 = i0.index_spec.signature.size();
    const int n0 = i0.tuple_length;
    const int p0 = static_cast<int>(i0.parameters.size());
    for (std::size_t r = 0; r < m.index_spec.signature.size(); ++r) {
        const std::string& name = m.index_spec.signature[r].name;
        if (r < s0) {
            m.formulas[name] = i0.formula(i0.index_spec.signature[r].name);
        } else {
            m.formulas[name] = map_terms(i1.formula(i1.index_spec.signature[r - s0].name), [&](const Term& t) {
                return t.is_param ? Term::parameter(t.param + p0) : Term::at(t.slot, t.coord + n0);
            });
        }
    }
    return m;
}

Witness product_witness(const Witness& w0, const Witness& w1) {
    if (w0.size() != w1.size()) throw Error(ErrorCode::OutOfRange, "product witnesses over different universes");
    Witness out = w0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].insert(out[i].end(), w1[i].begin(), w1[i].end());
    return out;
}

namespace {

// Copies tables positionally onto another signature with the same arities.
FiniteStructure retarget(const FiniteStructure& s, const Signature& sig, std::size_t offset) {
    FiniteStructure out(sig, s.size());
    for (std::size_t r = 0; r < sig.size(); ++r)
        for (std::size_t i = 0; i < out.table_size(r); ++i) out.set_at(r, i, s.holds_at(r + offset, i));
    return out;
}

}  // namespace

ConfigResult product_certificate(const ConfigCertificate& c0, const ConfigCertificate& c1, int size_bound, const SearchContext& ctx) {
    if (!(c0.target.structure == c1.target.structure)) throw Error(ErrorCode::SignatureMismatch, "factor certificates use different targets");
    if (size_bound > std::min(c0.size_bound, c1.size_bound)) throw Error(ErrorCode::OutOfRange, "product bound exceeds a factor bound");
    InterpretationMap prod = product_configuration(c0.interpretation, c1.interpretation);
    const Signature& sig0 = c0.interpretation.index_spec.signature;
    const Signature& sig1 = c1.interpretation.index_spec.signature;
    WitnessSource source = [&](const FiniteStructure& a) -> std::optional<Witness> {
        auto w0 = c0.witness_for(retarget(a, sig0, 0));
        auto w1 = c1.witness_for(retarget(a, sig1, sig0.size()));
        if (!w0 || !w1) return std::nullopt;
        return product_witness(*w0, *w1);
    };
    // Product witnesses must verify on their own: no fallback search.
    ConfigResult res = verify_configuration(prod, c0.target, size_bound, ctx, [&](const FiniteStructure& a) -> std::optional<Witness> {
        auto w = source(a);
        if (!w || !witness_valid(prod, c0.target.structure, a, *w))
            throw Error(ErrorCode::WitnessMissing, "concatenated factor witnesses fail for a member of " + prod.index_spec.name);
        return w;
    });
    return res;
}

InterpretationMap compose_configurations(const InterpretationMap& outer, const InterpretationMap& inner) {
    if (!outer.parameter_free()) throw Error(ErrorCode::NotParameterFree, "outer interpretation has parameters");
    if (outer.target_signature != inner.index_spec.signature)
        throw Error(ErrorCode::SignatureMismatch, "outer target signature is not the inner index signature");
    const int ni = inner.tuple_length;
    InterpretationMap m;
    m.index_spec = outer.index_spec;
    m.target_signature = inner.target_signature;
    m.tuple_length = outer.tuple_length * ni;
    m.parameters = inner.parameters;
    for (const auto& [name, f] : outer.formulas) {
        m.formulas[name] = map_atoms(f, [&](const Formula& at) -> Formula {
            if (at.kind == Formula::Kind::Eq) {
                std::vector<Formula> parts;
                for (int d = 0; d < ni; ++d)
                    parts.push_back(Formula::equal(Term::at(at.args[0].slot, at.args[0].coord * ni + d),
                                                   Term::at(at.args[1].slot, at.args[1].coord * ni + d)));
                return Formula::conj(std::move(parts));
            }
            return map_terms(inner.formula(at.relation), [&](const Term& t) {
                if (t.is_param) return t;
                const Term& outer_arg = at.args[static_cast<std::size_t>(t.slot)];
                return Term::at(outer_arg.slot, outer_arg.coord * ni + t.coord);
            });
        });
    }
    return m;
}

std::optional<Witness> compose_witness(const Witness& outer_w, const FiniteStructure& outer_target, int inner_tuple_length,
                                       const WitnessSource& inner_source) {
    std::vector<int> used;
    for (const auto& t : outer_w) used.insert(used.end(), t.begin(), t.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    FiniteStructure b = induced_substructure(outer_target, used);
    auto g = inner_source(b);
    if (!g) return std::nullopt;
    Witness out;
    for (const auto& t : outer_w) {
        Tuple composite;
        for (int v : t) {
            auto pos = static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), v) - used.begin());
            const Tuple& inner = (*g)[pos];
            if (static_cast<int>(inner.size()) != inner_tuple_length) return std::nullopt;
            composite.insert(composite.end(), inner.begin(), inner.end());
        }
        out.push_back(std::move(composite));
    }
    return out;
}

namespace {

std::string mapped_name(const std::map<std::string, std::string>& rename, const std::string& name) {
    auto it = rename.find(name);
    return it == rename.end() ? name : it->second;
}

}  // namespace

std::optional<FiniteStructure> reductive_expansion(const ClassSpec& index, const ClassSpec& sub, const FiniteStructure& a,
                                                   const std::map<std::string, std::string>& rename) {
    PartialStructure p(index.signature, a.size());
    for (std::size_t r = 0; r < sub.signature.size(); ++r) {
        int target = index.signature.index_of(mapped_name(rename, sub.signature[r].name));
        if (target < 0 || index.signature[static_cast<std::size_t>(target)].arity != sub.signature[r].arity)
            throw Error(ErrorCode::SignatureMismatch, "relation '" + sub.signature[r].name + "' has no index counterpart");
        for (std::size_t i = 0; i < a.table_size(r); ++i) p.set(static_cast<std::size_t>(target), i, a.holds_at(r, i) ? 1 : 0);
    }
    return first_completion(index, p);
}

InterpretationMap restrict_to_reductive_subclass(const InterpretationMap& interp, const ClassSpec& sub, int bound,
                                                 const std::map<std::string, std::string>& rename, const SearchContext& ctx) {
    for (const auto& r : sub.signature) {
        int idx = interp.index_spec.signature.index_of(mapped_name(rename, r.name));
        if (idx < 0 || interp.index_spec.signature[static_cast<std::size_t>(idx)].arity != r.arity)
            throw Error(ErrorCode::SignatureMismatch, "relation '" + r.name + "' has no index counterpart of equal arity");
    }
    for (const auto& a : enumerate_up_to(sub, bound, ctx))
        if (!reductive_expansion(interp.index_spec, sub, a, rename))
            throw Error(ErrorCode::NotReductive, "no " + interp.index_spec.name + " expansion of " + structure_to_json(a).dump());
    InterpretationMap m;
    m.index_spec = sub;
    m.target_signature = interp.target_signature;
    m.tuple_length = interp.tuple_length;
    m.parameters = interp.parameters;
    for (const auto& r : sub.signature) m.formulas[r.name] = interp.formula(mapped_name(rename, r.name));
    return m;
}

ConfigResult transfer_to_subclass(const ConfigCertificate& cert, const InterpretationMap& restricted,
                                  const std::map<std::string, std::string>& rename, const SearchContext& ctx) {
    const ClassSpec& index = cert.interpretation.index_spec;
    return verify_configuration(restricted, cert.target, cert.size_bound, ctx, [&](const FiniteStructure& a) -> std::optional<Witness> {
        auto b = reductive_expansion(index, restricted.index_spec, a, rename);
        if (!b) return std::nullopt;
        return cert.witness_for(*b);
    });
}

json interpretation_to_json(const InterpretationMap& interp) {
    json formulas = json::object();
    for (const auto& [name, f] : interp.formulas) formulas[name] = to_string(f);
    return {{"index", interp.index_spec.name},
            {"target_signature", signature_to_json(interp.target_signature)},
            {"tuple_length", interp.tuple_length},
            {"parameters", interp.parameters},
            {"formulas", formulas}};
}

InterpretationMap interpretation_from_json(const json& j) {
    InterpretationMap m;
    m.index_spec = parse_class(j.at("index").get<std::string>());
    m.target_signature = signature_from_json(j.at("target_signature"));
    m.tuple_length = j.at("tuple_length").get<int>();
    if (j.contains("parameters")) m.parameters = j.at("parameters").get<std::vector<int>>();
    for (const auto& [name, text] : j.at("formulas").items()) m.formulas[name] = parse_formula(text.get<std::string>());
    m.validate();
    return m;
}

json witness_to_json(const Witness& w) { return json(w); }

json certificate_to_json(const ConfigCertificate& cert) {
    json witnesses = json::array();
    for (std::size_t i = 0; i < cert.structures.size(); ++i)
        witnesses.push_back({{"A", structure_to_json(cert.structures[i])}, {"f", witness_to_json(cert.witnesses[i])}});
    return {{"interpretation", interpretation_to_json(cert.interpretation)},
            {"target",
             {{"spec", cert.target.spec.name},
              {"size", cert.target.structure.size()},
              {"certified_level", cert.target.certified_level},
              {"embedding_size", cert.target.embedding_size}}},
            {"size_bound", cert.size_bound},
            {"points_needed", cert.points_needed},
            {"witnesses", witnesses}};
}

}  // namespace fraisse
