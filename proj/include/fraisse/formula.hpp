#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fraisse/structure.hpp"

namespace fraisse {

// Coordinate `coord` of argument slot `slot`, or parameter `param`.
struct Term {
    bool is_param = false;
    int slot = 0;
    int coord = 0;
    int param = 0;

    static Term at(int slot, int coord) { return {false, slot, coord, 0}; }
    static Term parameter(int index) { return {true, 0, 0, index}; }
    bool operator==(const Term&) const = default;
};

// Quantifier-free formula over a target signature.
//
// Text grammar:
//   or   := and ('|' and)*
//   and  := not ('&' not)*
//   not  := '!' not | '(' or ')' | 'true' | 'false' | NAME '(' term (',' term)* ')'
//         | term '=' term | term '!=' term
//   term := DIGITS '.' DIGITS | 'p' DIGITS
// "R(0.1, 1.0)" applies R to coordinate 1 of slot 0 and coordinate 0 of slot 1.
struct Formula {
    enum class Kind { True, False, Atom, Eq, Not, And, Or };

    Kind kind = Kind::True;
    std::string relation;
    int rel = -1;  // index into the bound signature, -1 when unbound
    std::vector<Term> args;
    std::vector<Formula> children;

    static Formula truth(bool value);
    static Formula atom(std::string relation, std::vector<Term> args);
    static Formula equal(Term a, Term b);
    static Formula negate(Formula f);
    // Flattens nested connectives of the same kind; empty conj is true, empty disj false.
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);

    bool operator==(const Formula& other) const;
};

Formula parse_formula(const std::string& text);
std::string to_string(const Formula& f);

// Resolves relation names against sig; UnknownRelation or SignatureMismatch
// (wrong argument count) on failure.
Formula bind(const Formula& f, const Signature& sig);

// Largest slot, coordinate and parameter index mentioned, or -1.
int max_slot(const Formula& f);
int max_coord(const Formula& f);
int max_param(const Formula& f);

// Applies fn to every term.
Formula map_terms(const Formula& f, const std::function<Term(const Term&)>& fn);
// Replaces every atom and equality by fn's result.
Formula map_atoms(const Formula& f, const std::function<Formula(const Formula&)>& fn);

std::size_t atom_count(const Formula& f);

struct Valuation {
    std::vector<const int*> slots;  // slot -> tuple of target vertices
    const int* params = nullptr;

    int value(const Term& t) const { return t.is_param ? params[t.param] : slots[static_cast<std::size_t>(t.slot)][t.coord]; }
};

bool evaluate(const Formula& f, const FiniteStructure& s, const Valuation& v);
bool evaluate(const Formula& f, const FiniteStructure& s, const std::vector<Tuple>& slots, const std::vector<int>& params = {});

}  // namespace fraisse
