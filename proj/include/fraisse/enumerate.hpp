#pragma once

#include <vector>

#include "fraisse/class_spec.hpp"

namespace fraisse {

// Members of exactly the given size, one per isomorphism type, in canonical
// form, sorted by encoding.  Built by one-point extension of the canonical
// members one size down, so the spec must be hereditary.  The budget counts
// generated candidate structures.
std::vector<FiniteStructure> enumerate_structures(const ClassSpec& spec, int size, const SearchContext& ctx = {});

// Same output computed from all labelled members; the slow reference.
std::vector<FiniteStructure> enumerate_structures_bruteforce(const ClassSpec& spec, int size, const SearchContext& ctx = {});

// Sizes 0..bound concatenated.
std::vector<FiniteStructure> enumerate_up_to(const ClassSpec& spec, int bound, const SearchContext& ctx = {});

}  // namespace fraisse
