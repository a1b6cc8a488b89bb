#pragma once

#include <stdexcept>

#include "fraisse/formula.hpp"

// Straight recursive evaluation by relation name, sharing nothing with the
// library's bound evaluator.
namespace oracle {

inline int term_value(const fraisse::Term& t, const std::vector<fraisse::Tuple>& slots, const std::vector<int>& params) {
    if (t.is_param) return params.at(static_cast<std::size_t>(t.param));
    return slots.at(static_cast<std::size_t>(t.slot)).at(static_cast<std::size_t>(t.coord));
}

inline bool eval(const fraisse::Formula& f, const fraisse::FiniteStructure& s, const std::vector<fraisse::Tuple>& slots,
                 const std::vector<int>& params = {}) {
    using K = fraisse::Formula::Kind;
    switch (f.kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Eq: return term_value(f.args[0], slots, params) == term_value(f.args[1], slots, params);
        case K::Not: return !eval(f.children[0], s, slots, params);
        case K::And:
            for (const auto& c : f.children)
                if (!eval(c, s, slots, params)) return false;
            return true;
        case K::Or:
            for (const auto& c : f.children)
                if (eval(c, s, slots, params)) return true;
            return false;
        case K::Atom: {
            const auto& sig = s.signature();
            for (std::size_t r = 0; r < sig.size(); ++r) {
                if (sig[r].name != f.relation) continue;
                fraisse::Tuple t;
                for (const auto& a : f.args) t.push_back(term_value(a, slots, params));
                return s.holds(r, t);
            }
            throw std::runtime_error("oracle: unknown relation " + f.relation);
        }
    }
    return false;
}

}  // namespace oracle
