#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fraisse/class_spec.hpp"
#include "fraisse/report.hpp"

namespace fraisse {

enum class Axiom { Hereditary, JointEmbedding, Amalgamation, StrongAmalgamation };

const char* axiom_name(Axiom a);
Axiom parse_axiom(const std::string& name);

struct Amalgam {
    FiniteStructure c;
    Embedding g0;
    Embedding g1;
};

// Searches C with |C| <= |B0|+|B1|-|A| and g0 f0 = g1 f1.  Strong requires the
// images to meet exactly in the image of A.
std::optional<Amalgam> find_amalgam(const ClassSpec& spec, const FiniteStructure& a, const FiniteStructure& b0,
                                    const FiniteStructure& b1, const Embedding& f0, const Embedding& f1, bool strong,
                                    const SearchContext& ctx = {});

VerificationReport verify_class_axioms(const ClassSpec& spec, int bound, Axiom axiom, const SearchContext& ctx = {});

VerificationReport check_property_preservation(const ClassSpec& spec0, const ClassSpec& spec1, Property property, int bound,
                                               const SearchContext& ctx = {});

VerificationReport check_fully_relational(const ClassSpec& spec, int arity, int witness_bound, const SearchContext& ctx = {});

VerificationReport check_self_similarity(const ClassSpec& spec, int bound, const SearchContext& ctx = {});

// atoms[r] packs R(x0,x0), R(x0,x1), R(x1,x0), R(x1,x1) as bits 0..3.
struct PairType {
    std::vector<std::uint8_t> atoms;

    bool holds(std::size_t rel, int i, int j) const { return (atoms[rel] >> (2 * i + j)) & 1u; }
    PairType star() const;
    bool operator==(const PairType&) const = default;
    auto operator<=>(const PairType&) const = default;
};

// Sorted; the canonical type order.
std::vector<PairType> enumerate_pair_types(const ClassSpec& spec, const SearchContext& ctx = {});
json pair_type_to_json(const ClassSpec& spec, const PairType& p);

}  // namespace fraisse
