#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "fraisse/class_spec.hpp"

namespace fraisse {

// Relation tables with a third value: -1 unknown, 0 false, 1 true.
class PartialStructure {
public:
    PartialStructure(Signature signature, int size);
    explicit PartialStructure(const FiniteStructure& s);
    // Copies base onto vertices 0..base.size()-1; tuples touching the new vertices stay unknown.
    static PartialStructure extend(const FiniteStructure& base, int extra);

    const Signature& signature() const { return signature_; }
    int size() const { return size_; }
    std::size_t table_size(std::size_t rel) const { return values_[rel].size(); }
    std::size_t index(std::size_t rel, const int* entries) const;
    std::size_t index(std::size_t rel, const Tuple& t) const { return index(rel, t.data()); }

    std::int8_t get(std::size_t rel, std::size_t idx) const { return values_[rel][idx]; }
    std::int8_t get(std::size_t rel, const Tuple& t) const { return values_[rel][index(rel, t)]; }
    void set(std::size_t rel, std::size_t idx, std::int8_t v) { values_[rel][idx] = v; }
    void set(std::size_t rel, const Tuple& t, bool v) { values_[rel][index(rel, t)] = v ? 1 : 0; }
    // Returns false if t already carries the opposite value.
    bool fix(std::size_t rel, const Tuple& t, bool v);

    FiniteStructure to_structure() const;  // unknowns read as false

private:
    Signature signature_;
    int size_ = 0;
    std::vector<std::vector<std::int8_t>> values_;
};

struct CompletionOptions {
    // Verify the constraints already violated by the known part before searching.
    bool check_fixed = true;
    // Randomizes the value tried first at each unknown tuple.
    std::mt19937_64* rng = nullptr;
    SearchContext ctx;
};

// Depth-first completion of the unknown tuples into members of spec, in
// lexicographic (relation, tuple) order, false before true.  visit returns
// false to stop.  Returns the number of members visited.
std::size_t complete_members(const ClassSpec& spec, const PartialStructure& partial,
                             const std::function<bool(const FiniteStructure&)>& visit,
                             const CompletionOptions& options = {});

std::optional<FiniteStructure> first_completion(const ClassSpec& spec, const PartialStructure& partial,
                                                const CompletionOptions& options = {});

// Every labelled member on {0..n-1}.
std::vector<FiniteStructure> labeled_members(const ClassSpec& spec, int n, const SearchContext& ctx = {});

// Consistent one-point extensions of base: members on base.size()+1 points
// restricting to base, in completion order.  These are the quantifier-free
// 1-types over base with the new vertex distinct from all of base.
std::vector<FiniteStructure> one_point_extensions(const ClassSpec& spec, const FiniteStructure& base,
                                                  const SearchContext& ctx = {});

}  // namespace fraisse
