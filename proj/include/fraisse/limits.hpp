#pragma once

#include <cstdint>
#include <optional>

#include "fraisse/class_spec.hpp"
#include "fraisse/report.hpp"

namespace fraisse {

// Finite stand-in for a limit.  certified_level is the extension-property
// level (-1 when uncertified).  embedding_size is a size s such that every
// member of spec with at most s points embeds; extension level k gives k + 1.
struct GenericModel {
    FiniteStructure structure;
    ClassSpec spec;
    int certified_level = -1;
    int embedding_size = 0;
    bool capped = false;
};

// E^{*m} on n^{m+1}, points flattened lexicographically.
GenericModel build_box_model(int m, int n, const SearchContext& ctx = {});
std::vector<int> box_coordinates(int point, int m, int n);
int box_point(const std::vector<int>& coords, int n);

struct ClosureOptions {
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    bool check_precondition = true;
    // Closure starts from this structure instead of the empty one.
    std::optional<FiniteStructure> start;
};

// One-point-extension closure.  Subsets are processed grouped by their largest
// point, in order of that point, so every subset is handled once even as fresh
// points are appended; atoms of a fresh point outside the subset are drawn
// from a seeded generator.
GenericModel build_generic_model(const ClassSpec& spec, int level, int size_cap, const ClosureOptions& options = {},
                                 const SearchContext& ctx = {});

// LO^{*k} on side^k: g <_i h iff (g(i), g(0), ..., g(k-1)) precedes (h(i), h(0), ...)
// lexicographically.  Every member of LO^{*k} with at most `side` points embeds.
GenericModel build_product_order_model(int k, int side);

VerificationReport check_extension_property(const GenericModel& model, int level, const SearchContext& ctx = {});

// Checks that every member with at most `size` points embeds; raises
// model.embedding_size on success.
VerificationReport certify_embedding_size(GenericModel& model, int size, const SearchContext& ctx = {});

// Distinct atom patterns realized by ordered pairs of distinct points.
std::size_t count_nonequality_pair_types(const FiniteStructure& s);

json model_to_json(const GenericModel& model);
GenericModel model_from_json(const json& j);

}  // namespace fraisse
