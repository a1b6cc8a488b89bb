#include "fraisse/formula.hpp"

#include <cctype>

#include "fraisse/error.hpp"

namespace fraisse {

Formula Formula::truth(bool value) {
    Formula f;
    f.kind = value ? Kind::True : Kind::False;
    return f;
}

Formula Formula::atom(std::string relation, std::vector<Term> args) {
    Formula f;
    f.kind = Kind::Atom;
    f.relation = std::move(relation);
    f.args = std::move(args);
    return f;
}

Formula Formula::equal(Term a, Term b) {
    Formula f;
    f.kind = Kind::Eq;
    f.args = {a, b};
    return f;
}

Formula Formula::negate(Formula g) {
    Formula f;
    f.kind = Kind::Not;
    f.children.push_back(std::move(g));
    return f;
}

namespace {

Formula connective(Formula::Kind kind, std::vector<Formula> parts) {
    std::vector<Formula> flat;
    for (auto& p : parts) {
        if (p.kind == kind) {
            for (auto& c : p.children) flat.push_back(std::move(c));
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) return Formula::truth(kind == Formula::Kind::And);
    if (flat.size() == 1) return std::move(flat.front());
    Formula f;
    f.kind = kind;
    f.children = std::move(flat);
    return f;
}

}  // namespace

Formula Formula::conj(std::vector<Formula> parts) { return connective(Kind::And, std::move(parts)); }
Formula Formula::disj(std::vector<Formula> parts) { return connective(Kind::Or, std::move(parts)); }

bool Formula::operator==(const Formula& other) const {
    return kind == other.kind && relation == other.relation && args == other.args && children == other.children;
}

namespace {

struct FormulaParser {
    const std::string& text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::Parse, "formula '" + text + "': " + msg + " at offset " + std::to_string(pos));
    }

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool starts_with(const std::string& s) {
        skip();
        return text.compare(pos, s.size(), s) == 0;
    }

    int number() {
        skip();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected a number");
        return std::stoi(text.substr(start, pos - start));
    }

    static bool name_char(char c) {
        return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ',' && c != '&' && c != '|' &&
               c != '!' && c != '=';
    }

    Term term() {
        skip();
        if (pos < text.size() && text[pos] == 'p') {
            ++pos;
            return Term::parameter(number());
        }
        int slot = number();
        if (!eat('.')) fail("expected '.' in coordinate reference");
        return Term::at(slot, number());
    }

    Formula parse_or() {
        std::vector<Formula> parts{parse_and()};
        while (eat('|')) parts.push_back(parse_and());
        return parts.size() == 1 ? std::move(parts.front()) : Formula::disj(std::move(parts));
    }

    Formula parse_and() {
        std::vector<Formula> parts{parse_not()};
        while (eat('&')) parts.push_back(parse_not());
        return parts.size() == 1 ? std::move(parts.front()) : Formula::conj(std::move(parts));
    }

    Formula parse_not() {
        skip();
        if (pos >= text.size()) fail("unexpected end");
        if (starts_with("!=")) fail("unexpected '!='");
        if (eat('!')) return Formula::negate(parse_not());
        if (eat('(')) {
            Formula f = parse_or();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == 'p' && pos + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + 1])) &&
                                                            !followed_by_paren())) {
            Term a = term();
            if (starts_with("!=")) {
                pos += 2;
                return Formula::negate(Formula::equal(a, term()));
            }
            if (!eat('=')) fail("expected '=' after term");
            return Formula::equal(a, term());
        }
        std::size_t start = pos;
        while (pos < text.size() && name_char(text[pos])) ++pos;
        std::string name = text.substr(start, pos - start);
        if (name.empty()) fail("expected a formula");
        skip();
        if (pos >= text.size() || text[pos] != '(') {
            if (name == "true") return Formula::truth(true);
            if (name == "false") return Formula::truth(false);
            fail("expected '(' after relation name '" + name + "'");
        }
        ++pos;
        std::vector<Term> args{term()};
        while (eat(',')) args.push_back(term());
        if (!eat(')')) fail("expected ')' closing atom");
        return Formula::atom(name, std::move(args));
    }

    // A token starting with 'p' is a relation name when an '(' follows the name.
    bool followed_by_paren() const {
        std::size_t p = pos;
        while (p < text.size() && name_char(text[p])) ++p;
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        return p < text.size() && text[p] == '(';
    }
};

std::string term_string(const Term& t) {
    if (t.is_param) return "p" + std::to_string(t.param);
    return std::to_string(t.slot) + "." + std::to_string(t.coord);
}

void print(const Formula& f, int parent, std::string& out) {
    // Precedence: Or 1, And 2, Not/atoms 3.
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True: out += "true"; return;
        case K::False: out += "false"; return;
        case K::Atom:
            out += f.relation + "(";
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ", ";
                out += term_string(f.args[i]);
            }
            out += ")";
            return;
        case K::Eq: out += term_string(f.args[0]) + " = " + term_string(f.args[1]); return;
        case K::Not:
            if (f.children[0].kind == K::Eq) {
                out += term_string(f.children[0].args[0]) + " != " + term_string(f.children[0].args[1]);
                return;
            }
            out += "!";
            print(f.children[0], 3, out);
            return;
        case K::And:
        case K::Or: {
            const int prec = f.kind == K::Or ? 1 : 2;
            if (prec < parent) out += "(";
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (i) out += f.kind == K::Or ? " | " : " & ";
                print(f.children[i], prec + 1, out);
            }
            if (prec < parent) out += ")";
            return;
        }
    }
}

template <class Fn>
void visit_terms(const Formula& f, Fn&& fn) {
    for (const auto& t : f.args) fn(t);
    for (const auto& c : f.children) visit_terms(c, fn);
}

}  // namespace

Formula parse_formula(const std::string& text) {
    FormulaParser p{text};
    Formula f = p.parse_or();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return f;
}

std::string to_string(const Formula& f) {
    std::string out;
    print(f, 0, out);
    return out;
}

Formula bind(const Formula& f, const Signature& sig) {
    Formula g = f;
    if (g.kind == Formula::Kind::Atom) {
        g.rel = sig.index_of(g.relation);
        if (g.rel < 0) throw Error(ErrorCode::UnknownRelation, "relation '" + g.relation + "' not in target signature");
        if (static_cast<int>(g.args.size()) != sig[static_cast<std::size_t>(g.rel)].arity)
            throw Error(ErrorCode::SignatureMismatch, "relation '" + g.relation + "' applied to " + std::to_string(g.args.size()) + " arguments");
    }
    for (auto& c : g.children) c = bind(c, sig);
    return g;
}

int max_slot(const Formula& f) {
    int m = -1;
    visit_terms(f, [&](const Term& t) {
        if (!t.is_param) m = std::max(m, t.slot);
    });
    return m;
}

int max_coord(const Formula& f) {
    int m = -1;
    visit_terms(f, [&](const Term& t) {
        if (!t.is_param) m = std::max(m, t.coord);
    });
    return m;
}

int max_param(const Formula& f) {
    int m = -1;
    visit_terms(f, [&](const Term& t) {
        if (t.is_param) m = std::max(m, t.param);
    });
    return m;
}

Formula map_terms(const Formula& f, const std::function<Term(const Term&)>& fn) {
    Formula g = f;
    for (auto& t : g.args) t = fn(t);
    for (auto& c : g.children) c = map_terms(c, fn);
    return g;
}

Formula map_atoms(const Formula& f, const std::function<Formula(const Formula&)>& fn) {
    if (f.kind == Formula::Kind::Atom || f.kind == Formula::Kind::Eq) return fn(f);
    Formula g = f;
    for (auto& c : g.children) c = map_atoms(c, fn);
    return g;
}

std::size_t atom_count(const Formula& f) {
    std::size_t n = (f.kind == Formula::Kind::Atom || f.kind == Formula::Kind::Eq) ? 1 : 0;
    for (const auto& c : f.children) n += atom_count(c);
    return n;
}

bool evaluate(const Formula& f, const FiniteStructure& s, const Valuation& v) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Atom: {
            int buf[8];
            std::vector<int> heap;
            int* entries = buf;
            if (f.args.size() > 8) {
                heap.resize(f.args.size());
                entries = heap.data();
            }
            for (std::size_t i = 0; i < f.args.size(); ++i) entries[i] = v.value(f.args[i]);
            int rel = f.rel;
            if (rel < 0) {
                rel = s.signature().index_of(f.relation);
                if (rel < 0) throw Error(ErrorCode::UnknownRelation, "relation '" + f.relation + "' not in target signature");
            }
            return s.holds(static_cast<std::size_t>(rel), entries);
        }
        case K::Eq: return v.value(f.args[0]) == v.value(f.args[1]);
        case K::Not: return !evaluate(f.children[0], s, v);
        case K::And:
            for (const auto& c : f.children)
                if (!evaluate(c, s, v)) return false;
            return true;
        case K::Or:
            for (const auto& c : f.children)
                if (evaluate(c, s, v)) return true;
            return false;
    }
    return false;
}

bool evaluate(const Formula& f, const FiniteStructure& s, const std::vector<Tuple>& slots, const std::vector<int>& params) {
    Valuation v;
    for (const auto& t : slots) v.slots.push_back(t.data());
    v.params = params.data();
    return evaluate(f, s, v);
}

}  // namespace fraisse
