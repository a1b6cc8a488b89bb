#include "fraisse/class_spec.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <numeric>
#include <set>

#include "fraisse/error.hpp"

namespace fraisse {

const char* property_name(Property p) {
    switch (p) {
        case Property::Symmetric: return "symmetric";
        case Property::Trichotomous: return "trichotomous";
        case Property::Reflexive: return "reflexive";
        case Property::Irreflexive: return "irreflexive";
        case Property::Transitive: return "transitive";
    }
    return "?";
}

Property parse_property(const std::string& name) {
    for (Property p : {Property::Symmetric, Property::Trichotomous, Property::Reflexive, Property::Irreflexive, Property::Transitive})
        if (name == property_name(p)) return p;
    throw Error(ErrorCode::Parse, "unknown property " + name);
}

const std::vector<std::vector<int>>& permutations_of(int k) {
    static std::mutex mu;
    static std::map<int, std::vector<std::vector<int>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    std::vector<std::vector<int>> out;
    std::vector<int> p(static_cast<std::size_t>(k));
    std::iota(p.begin(), p.end(), 0);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return cache.emplace(k, std::move(out)).first->second;
}

bool check_relation_property(const FiniteStructure& s, std::size_t rel, Property p) {
    const int arity = s.signature()[rel].arity;
    const int n = s.size();
    if (p == Property::Transitive && arity != 2)
        throw Error(ErrorCode::TransitivityOnNonBinary, "transitivity requested for arity " + std::to_string(arity));
    const auto& perms = permutations_of(arity);
    Tuple u(static_cast<std::size_t>(arity));
    for (std::size_t i = 0; i < s.table_size(rel); ++i) {
        Tuple t = decode_tuple(i, n, arity);
        bool v = s.holds_at(rel, i);
        std::set<int> distinct(t.begin(), t.end());
        bool all_distinct = static_cast<int>(distinct.size()) == arity;
        switch (p) {
            case Property::Symmetric:
                if (v)
                    for (const auto& sigma : perms) {
                        for (int k = 0; k < arity; ++k) u[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(sigma[static_cast<std::size_t>(k)])];
                        if (!s.holds(rel, u)) return false;
                    }
                break;
            case Property::Trichotomous:
                if (all_distinct) {
                    int hits = 0;
                    for (const auto& sigma : perms) {
                        for (int k = 0; k < arity; ++k) u[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(sigma[static_cast<std::size_t>(k)])];
                        if (s.holds(rel, u)) ++hits;
                    }
                    if (hits != 1) return false;
                }
                break;
            case Property::Reflexive:
                if (distinct.size() == 1 && !v) return false;
                break;
            case Property::Irreflexive:
                if (!all_distinct && v) return false;
                break;
            case Property::Transitive:
                if (v)
                    for (int c = 0; c < n; ++c) {
                        Tuple bc{t[1], c};
                        Tuple ac{t[0], c};
                        if (s.holds(rel, bc) && !s.holds(rel, ac)) return false;
                    }
                break;
        }
    }
    return true;
}

bool check_relation_property(const FiniteStructure& s, const std::string& relation, Property p) {
    int rel = s.signature().index_of(relation);
    if (rel < 0) throw Error(ErrorCode::UnknownRelation, relation);
    return check_relation_property(s, static_cast<std::size_t>(rel), p);
}

bool ClassSpec::contains(const FiniteStructure& s) const {
    if (s.signature() != signature) return false;
    for (std::size_t r = 0; r < signature.size(); ++r)
        for (Property p : {Property::Symmetric, Property::Trichotomous, Property::Reflexive, Property::Irreflexive, Property::Transitive})
            if (has(r, p) && !check_relation_property(s, r, p)) return false;
    for (const auto& c : customs)
        if (!c.accepts(reduct(s, c.over))) return false;
    return true;
}

bool ClassSpec::all(Property p) const {
    for (std::size_t r = 0; r < signature.size(); ++r)
        if (!has(r, p)) return false;
    return true;
}

namespace {

ClassSpec single(const std::string& name, const std::string& rel, int arity, PropertySet props) {
    ClassSpec k;
    k.name = name;
    k.signature = Signature({{rel, arity}});
    k.properties = {props};
    return k;
}

}  // namespace

ClassSpec spec_S() {
    ClassSpec k;
    k.name = "S";
    return k;
}

ClassSpec spec_LO() {
    return single("LO", "<", 2, bit(Property::Trichotomous) | bit(Property::Irreflexive) | bit(Property::Transitive));
}

ClassSpec spec_E() {
    return single("E", "E", 2, bit(Property::Symmetric) | bit(Property::Reflexive) | bit(Property::Transitive));
}

ClassSpec spec_G() { return single("G", "E", 2, bit(Property::Symmetric) | bit(Property::Irreflexive)); }

ClassSpec spec_T() { return single("T", "T", 2, bit(Property::Trichotomous) | bit(Property::Irreflexive)); }

ClassSpec spec_H(int k) {
    if (k < 2) throw Error(ErrorCode::OutOfRange, "hypergraph arity must be at least 2");
    return single("H" + std::to_string(k), "H", k, bit(Property::Symmetric) | bit(Property::Irreflexive));
}

ClassSpec spec_P() {
    ClassSpec k = single("P", "P", 1, 0);
    k.customs.push_back({"at-most-one-P", k.signature, [](const FiniteStructure& s) { return s.count(0) <= 1; }});
    return k;
}

ClassSpec builtin(const std::string& name) {
    if (name == "S") return spec_S();
    if (name == "LO") return spec_LO();
    if (name == "E") return spec_E();
    if (name == "G") return spec_G();
    if (name == "T") return spec_T();
    if (name == "P") return spec_P();
    if (name.size() > 1 && name[0] == 'H' && std::all_of(name.begin() + 1, name.end(), [](unsigned char c) { return std::isdigit(c); }))
        return spec_H(std::stoi(name.substr(1)));
    throw Error(ErrorCode::Parse, "unknown class " + name);
}

namespace {

bool composite(const std::string& name) { return name.find_first_of("*^") != std::string::npos; }

std::string wrap(const std::string& name) { return composite(name) ? "(" + name + ")" : name; }

Signature rename_signature(const Signature& sig, const std::map<std::string, std::string>& names) {
    std::vector<Relation> rels;
    for (const auto& r : sig) {
        auto it = names.find(r.name);
        rels.push_back({it == names.end() ? r.name : it->second, r.arity});
    }
    return Signature(rels);
}

ClassSpec with_suffix(const ClassSpec& k, const std::string& suffix) {
    std::map<std::string, std::string> names;
    for (const auto& r : k.signature) names[r.name] = r.name + suffix;
    return rename_relations(k, names);
}

ClassSpec join(const ClassSpec& a, const ClassSpec& b, std::string name) {
    ClassSpec out;
    out.name = std::move(name);
    std::vector<Relation> rels = a.signature.relations();
    rels.insert(rels.end(), b.signature.begin(), b.signature.end());
    out.signature = Signature(rels);
    out.properties = a.properties;
    out.properties.insert(out.properties.end(), b.properties.begin(), b.properties.end());
    out.customs = a.customs;
    out.customs.insert(out.customs.end(), b.customs.begin(), b.customs.end());
    return out;
}

}  // namespace

ClassSpec rename_relations(const ClassSpec& k, const std::map<std::string, std::string>& names) {
    ClassSpec out = k;
    out.signature = rename_signature(k.signature, names);
    for (auto& c : out.customs) c.over = rename_signature(c.over, names);
    return out;
}

ClassSpec superpose(const ClassSpec& a, const ClassSpec& b) {
    std::string name = wrap(a.name) + "*" + wrap(b.name);
    bool clash = false;
    for (const auto& r : b.signature) clash = clash || a.signature.contains(r.name);
    if (!clash) return join(a, b, name);
    return join(with_suffix(a, "#0"), with_suffix(b, "#1"), name);
}

ClassSpec power(const ClassSpec& k, int n) {
    if (n < 0) throw Error(ErrorCode::OutOfRange, "negative power");
    if (n == 0) return spec_S();
    if (n == 1) return k;
    ClassSpec out = with_suffix(k, "#0");
    for (int i = 1; i < n; ++i) out = join(out, with_suffix(k, "#" + std::to_string(i)), "");
    out.name = wrap(k.name) + "^" + std::to_string(n);
    return out;
}

namespace {

struct ClassParser {
    std::string text;
    std::size_t pos = 0;

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorCode::Parse, "class expression '" + text + "': " + msg + " at offset " + std::to_string(pos));
    }

    ClassSpec expr() {
        ClassSpec k = term();
        skip();
        while (pos < text.size() && text[pos] == '*') {
            ++pos;
            k = superpose(k, term());
            skip();
        }
        return k;
    }

    ClassSpec term() {
        ClassSpec k = atom();
        skip();
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            skip();
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (start == pos) fail("expected exponent");
            k = power(k, std::stoi(text.substr(start, pos - start)));
        }
        return k;
    }

    ClassSpec atom() {
        skip();
        if (pos >= text.size()) fail("unexpected end");
        if (text[pos] == '(') {
            ++pos;
            ClassSpec k = expr();
            skip();
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
            return k;
        }
        std::size_t start = pos;
        while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected class name");
        return builtin(text.substr(start, pos - start));
    }
};

}  // namespace

ClassSpec parse_class(const std::string& text) {
    ClassParser p{text};
    ClassSpec k = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return k;
}

}  // namespace fraisse
