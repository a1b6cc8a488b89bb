#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fraisse/structure.hpp"

namespace fraisse {

enum class Property { Symmetric, Trichotomous, Reflexive, Irreflexive, Transitive };

using PropertySet = unsigned;

constexpr PropertySet bit(Property p) { return 1u << static_cast<unsigned>(p); }

const char* property_name(Property p);
Property parse_property(const std::string& name);

// Membership test on the reduct to `over` (relations in that order).
struct CustomConstraint {
    std::string name;
    Signature over;
    std::function<bool(const FiniteStructure&)> accepts;
};

struct ClassSpec {
    std::string name;
    Signature signature;
    std::vector<PropertySet> properties;  // parallel to signature
    std::vector<CustomConstraint> customs;

    bool contains(const FiniteStructure& s) const;
    bool has(std::size_t rel, Property p) const { return (properties[rel] & bit(p)) != 0; }
    // Every relation carries the property (vacuous for the empty signature).
    bool all(Property p) const;
    bool binary() const { return signature.binary(); }
};

ClassSpec spec_S();
ClassSpec spec_LO();
ClassSpec spec_E();
ClassSpec spec_G();
ClassSpec spec_T();
ClassSpec spec_H(int k);
// Unary P holding of at most one element.
ClassSpec spec_P();

ClassSpec builtin(const std::string& name);
ClassSpec superpose(const ClassSpec& a, const ClassSpec& b);
// K^{*n}; n = 1 returns K, n = 0 returns S.
ClassSpec power(const ClassSpec& k, int n);
ClassSpec rename_relations(const ClassSpec& k, const std::map<std::string, std::string>& names);

// Grammar: expr := term ('*' term)* ; term := atom ('^' digits)? ; atom := NAME | '(' expr ')'.
ClassSpec parse_class(const std::string& text);

bool check_relation_property(const FiniteStructure& s, const std::string& relation, Property p);
bool check_relation_property(const FiniteStructure& s, std::size_t rel, Property p);

// All permutations of {0..k-1} in lexicographic order.
const std::vector<std::vector<int>>& permutations_of(int k);

}  // namespace fraisse
