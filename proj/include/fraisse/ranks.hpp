#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

#include "fraisse/classes.hpp"
#include "fraisse/config.hpp"

namespace fraisse {

using BigInt = boost::multiprecision::cpp_int;

// Bipartite graph between n x {0} and n x {1}: bit i*n + j is the edge {(i,0),(j,1)}.
using BipartiteCode = std::uint32_t;

BipartiteCode code_star(BipartiteCode g, int n);
bool code_symmetric(BipartiteCode g, int n);
bool code_has(BipartiteCode g, int n, int i, int j);

struct BipartiteCounts {
    BigInt total;
    BigInt symmetric;
    BigInt nonsymmetric;
    bool brute_checked = false;  // n <= 3: cross-checked by enumerating codes
};

BipartiteCounts bipartite_counts(int n);

// |S_2| for K^{*m}: the pair types realized by distinct points.
std::size_t s2_count(const ClassSpec& k, int m, const SearchContext& ctx = {});

// The n-tuple interpretation of K^{*(n^2-1)} into a graph.
struct QuadConstruction {
    ClassSpec base;
    ClassSpec index;
    int n = 0;
    int m = 0;
    bool symmetric_case = false;
    std::string graph_relation;
    std::vector<PairType> types;                 // S_2 in canonical order
    std::vector<std::vector<BipartiteCode>> h;   // parallel to types
    std::size_t capacity = 0;                    // allowed outputs for h
    InterpretationMap interpretation;

    // Codes assigned to the pair type of (a, b), a != b in A.
    const std::vector<BipartiteCode>& codes_for(const FiniteStructure& a, int x, int y) const;
};

// Greedy h: types in canonical order, each takes the free output with the
// smallest code.  Formulas are emitted for n <= 3 (larger n only builds h).
QuadConstruction make_quad_construction(const ClassSpec& k, int n, const std::string& graph_relation = "E",
                                        const SearchContext& ctx = {});
// h injective, and h(p) = {G, G*} resp. {G} with G non-symmetric and h(p*) = h(p)*.
bool check_quad_assignment(const QuadConstruction& q);
// R-graph on n x A, point (i, a) numbered a*n + i.
FiniteStructure quad_r_graph(const QuadConstruction& q, const FiniteStructure& a);
// Realizes the R-graph in the target by embedding search.
WitnessSource quad_witness_source(const QuadConstruction& q, const GenericModel& target, const SearchContext& ctx = {});

struct QuadResult {
    QuadConstruction construction;
    ConfigResult result;
};

QuadResult build_quad_configuration(const ClassSpec& k, int n, const GenericModel& target, int bound, const SearchContext& ctx = {});

struct UpperBound {
    int value = 0;
    std::string justification;
    json details;
};

UpperBound counting_upper_bound(const ClassSpec& k, int n, const SearchContext& ctx = {});

// phi_i = [y_{0,i} = y_{1,i}] on (m+1)-tuples; witnesses come from the box embedding.
InterpretationMap make_E_box_interpretation(int m, const Signature& target_signature);
// Box coordinates of the points of A: E_i classes numbered by first occurrence,
// last coordinate numbers the point inside its class intersection.
std::vector<Tuple> box_embedding(const FiniteStructure& a);
ConfigResult build_E_box_configuration(int m, const GenericModel& target, int bound, const SearchContext& ctx = {});

struct EOrdersResult {
    InterpretationMap interpretation;
    ConfigResult result;
    std::size_t type_count = 0;
    bool pigeonhole = false;  // 2(2^k - 1) > 2^k
    json record;
};

// E^{*floor(k/2)} into 1-tuples of an LO^{*k} model.
EOrdersResult build_E_into_orders(int k, const GenericModel& target, int bound, const SearchContext& ctx = {});

struct PatternWitness {
    std::string kind;  // "IRD" or "ICT"
    int depth = 0;
    int length = 0;
    std::vector<Formula> formulas;
    std::vector<std::vector<int>> rows;       // g : depth -> length, lexicographic
    std::vector<Tuple> row_tuples;            // d_g (IRD) or c_g (ICT)
    std::vector<Tuple> columns;               // c_j
    std::vector<int> parameters;
    std::vector<std::vector<std::vector<int>>> signs;  // [g][i][j]
    bool verified = false;

    json to_json() const;
};

// I must interpret LO^{*m}; eta is the product order on (2 length)^m.
PatternWitness extract_IRD_pattern(const InterpretationMap& interp, const GenericModel& target, int length,
                                   const WitnessSource& source = {}, const SearchContext& ctx = {});
// I must interpret E^{*m}; eta is the coordinate-equality structure on length^m.
PatternWitness extract_ICT_pattern(const InterpretationMap& interp, const GenericModel& target, int length,
                                   const WitnessSource& source = {}, const SearchContext& ctx = {});
// The index-class structure the extraction realizes.
FiniteStructure IRD_source_structure(const ClassSpec& index, int length);
FiniteStructure ICT_source_structure(const ClassSpec& index, int length);

struct PipelineResult {
    QuadConstruction construction;
    GenericModel target;  // generic graph grown around the R-graph of the source structure
    ConfigResult configuration;
    PatternWitness pattern;
};

// Quad construction for K at n = 2, target from closure seeded with the R-graph.
PipelineResult quad_pattern_pipeline(const ClassSpec& k, bool ird, int length, int bound, std::uint64_t seed = 1,
                                     const SearchContext& ctx = {});

struct DaggerReport {
    std::size_t pair_types = 0;           // swap reading
    std::size_t pair_types_reversed = 0;  // (b*, a*) reading
    std::size_t unary_pair_types = 0;     // 2-types of single points, equality included
    bool count_ok = false;
    std::vector<json> claim;              // n = 3..10
    bool claim_ok = false;
    int base_bound = 0;
    bool base_ok = false;
    std::string note;

    bool ok() const { return count_ok && claim_ok && base_ok; }
    json to_json() const;
};

// model: a generic graph in which every graph on 4 points embeds.
DaggerReport verify_dagger_base_case(const GenericModel& model);

struct RankResult {
    std::string class_name;
    int n = 0;
    int lower = 0;
    std::string lower_construction;
    std::optional<ConfigCertificate> certificate;
    VerificationReport lower_report;
    UpperBound upper;
    std::optional<int> exact;

    json to_json(bool with_certificate = true) const;
};

RankResult compute_rank(const ClassSpec& k, int n, const GenericModel& target, int bound, const SearchContext& ctx = {});
std::vector<RankResult> compute_rank_table(const ClassSpec& k, int n_max, const GenericModel& target, int bound,
                                           const SearchContext& ctx = {});

// Generic graph at extension level 3 with every graph on 6 points embedding.
GenericModel standard_graph_target(std::uint64_t seed = 0x9e3779b97f4a7c15ull, const SearchContext& ctx = {});

}  // namespace fraisse
