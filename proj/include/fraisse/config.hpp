#pragma once

#include <functional>
#include <map>
#include <optional>

#include "fraisse/formula.hpp"
#include "fraisse/limits.hpp"

namespace fraisse {

// Index relation R of arity k is sent to a formula with k argument slots, each
// slot a tuple of tuple_length target vertices.
struct InterpretationMap {
    ClassSpec index_spec;
    Signature target_signature;
    int tuple_length = 1;
    std::vector<int> parameters;
    std::map<std::string, Formula> formulas;

    bool parameter_free() const { return parameters.empty(); }
    const Formula& formula(const std::string& relation) const;
    // Checks slots, coordinates, parameters and relation names.
    void validate() const;
};

// Point a of A goes to the tuple w[a]; distinct points get distinct tuples.
using Witness = std::vector<Tuple>;

struct ConfigCertificate {
    InterpretationMap interpretation;
    GenericModel target;
    int size_bound = 0;
    // Largest number of target points some witness search could have needed.
    int points_needed = 0;
    std::vector<FiniteStructure> structures;  // canonical, enumeration order
    std::vector<Witness> witnesses;

    // Witness for an arbitrary member of size <= size_bound, through its canonical form.
    std::optional<Witness> witness_for(const FiniteStructure& a) const;
};

struct ConfigResult {
    VerificationReport report;
    std::optional<ConfigCertificate> certificate;
};

bool witness_valid(const InterpretationMap& interp, const FiniteStructure& target, const FiniteStructure& a, const Witness& w);

// Backtracking over target tuples in lexicographic order, points of A in
// order; tuples are prefiltered on the diagonal atoms.
std::optional<Witness> find_witness(const InterpretationMap& interp, const FiniteStructure& target, const FiniteStructure& a,
                                    const SearchContext& ctx = {});

using WitnessSource = std::function<std::optional<Witness>(const FiniteStructure& a)>;

// Every canonical A with |A| <= size_bound gets a witness from the source
// (default: find_witness); each is re-checked.  A failed search is
// Inconclusive when the target does not contain every member on the points
// the search could use, else Refuted.
ConfigResult verify_configuration(const InterpretationMap& interp, const GenericModel& target, int size_bound,
                                  const SearchContext& ctx = {}, const WitnessSource& source = {});

// Re-evaluates every biconditional of every witness.
bool recheck_certificate(const ConfigCertificate& cert);

InterpretationMap identity_configuration(const ClassSpec& k);
// The class S into tuples of the given length: no formulas.
InterpretationMap trivial_configuration(const Signature& target_signature, int tuple_length);

// Appends unused coordinates; witnesses repeat the first coordinate.
InterpretationMap pad_configuration(const InterpretationMap& interp, int extra);
Witness pad_witness(const Witness& w, int extra);

// Parameter j becomes coordinate n + j of slot 0 (the appended block).
InterpretationMap make_parameter_free(const InterpretationMap& interp);
Witness parameter_free_witness(const InterpretationMap& original, const Witness& w);
ConfigCertificate make_parameter_free(const ConfigCertificate& cert);

InterpretationMap product_configuration(const InterpretationMap& i0, const InterpretationMap& i1);
Witness product_witness(const Witness& w0, const Witness& w1);
// Certificate for the product class from factor certificates over one target.
ConfigResult product_certificate(const ConfigCertificate& c0, const ConfigCertificate& c1, int size_bound,
                                 const SearchContext& ctx = {});

// outer: parameter-free map into inner's index signature.  Outer equalities become
// coordinatewise equalities.
InterpretationMap compose_configurations(const InterpretationMap& outer, const InterpretationMap& inner);
// outer_w lives in outer_target; its used points form a member B of the inner
// index class, and inner_source supplies a witness for B.
std::optional<Witness> compose_witness(const Witness& outer_w, const FiniteStructure& outer_target, int inner_tuple_length,
                                       const WitnessSource& inner_source);

// sub's relations renamed through `rename` (identity when absent) must be
// index relations of equal arity.  Reductivity is searched for every member of
// sub up to `bound`; NotReductive names the first failure.
InterpretationMap restrict_to_reductive_subclass(const InterpretationMap& interp, const ClassSpec& sub, int bound,
                                                 const std::map<std::string, std::string>& rename = {},
                                                 const SearchContext& ctx = {});
// An index-class member whose reduct (after renaming) is a.
std::optional<FiniteStructure> reductive_expansion(const ClassSpec& index, const ClassSpec& sub, const FiniteStructure& a,
                                                   const std::map<std::string, std::string>& rename = {});
ConfigResult transfer_to_subclass(const ConfigCertificate& cert, const InterpretationMap& restricted,
                                  const std::map<std::string, std::string>& rename = {}, const SearchContext& ctx = {});

json interpretation_to_json(const InterpretationMap& interp);
InterpretationMap interpretation_from_json(const json& j);
json witness_to_json(const Witness& w);
json certificate_to_json(const ConfigCertificate& cert);

}  // namespace fraisse
