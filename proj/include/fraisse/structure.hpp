#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraisse/search.hpp"

namespace fraisse {

struct Relation {
    std::string name;
    int arity = 2;

    bool operator==(const Relation&) const = default;
};

class Signature {
public:
    Signature() = default;
    Signature(std::vector<Relation> relations);

    std::size_t size() const { return relations_.size(); }
    bool empty() const { return relations_.empty(); }
    const Relation& operator[](std::size_t i) const { return relations_[i]; }
    const std::vector<Relation>& relations() const { return relations_; }

    // -1 when absent.
    int index_of(const std::string& name) const;
    bool contains(const std::string& name) const { return index_of(name) >= 0; }
    bool binary() const;
    int max_arity() const;

    bool operator==(const Signature&) const = default;

    auto begin() const { return relations_.begin(); }
    auto end() const { return relations_.end(); }

private:
    std::vector<Relation> relations_;
};

using Tuple = std::vector<int>;
using Embedding = std::vector<int>;

// Relation tables are dense bit arrays indexed by the tuple read as a base-n
// numeral, so index order is lexicographic tuple order.
class FiniteStructure {
public:
    FiniteStructure() = default;
    FiniteStructure(Signature signature, int size);

    const Signature& signature() const { return signature_; }
    int size() const { return size_; }

    std::size_t table_size(std::size_t rel) const { return tables_[rel].size(); }
    std::size_t index(std::size_t rel, const int* entries) const;
    std::size_t index(std::size_t rel, const Tuple& t) const { return index(rel, t.data()); }

    bool holds(std::size_t rel, const Tuple& t) const { return tables_[rel][index(rel, t)] != 0; }
    bool holds(std::size_t rel, const int* entries) const { return tables_[rel][index(rel, entries)] != 0; }
    bool holds_at(std::size_t rel, std::size_t idx) const { return tables_[rel][idx] != 0; }
    void set(std::size_t rel, const Tuple& t, bool value = true);
    void set_at(std::size_t rel, std::size_t idx, bool value) { tables_[rel][idx] = value ? 1 : 0; }

    const std::vector<std::uint8_t>& table(std::size_t rel) const { return tables_[rel]; }

    // Lexicographically sorted member tuples of a relation.
    std::vector<Tuple> tuples(std::size_t rel) const;
    std::size_t count(std::size_t rel) const;

    // Concatenated tables: the bit encoding used for canonical forms.
    std::vector<std::uint8_t> encoding() const;

    bool operator==(const FiniteStructure&) const = default;
    bool operator<(const FiniteStructure& other) const;

private:
    Signature signature_;
    int size_ = 0;
    std::vector<std::vector<std::uint8_t>> tables_;
};

// Decodes a table index back to its tuple.
Tuple decode_tuple(std::size_t idx, int n, int arity);

// Result has T |= R(sigma(a)) iff S |= R(a); sigma maps old vertex to new vertex.
FiniteStructure permute(const FiniteStructure& s, const std::vector<int>& sigma);

FiniteStructure canonical_form(const FiniteStructure& s);
// canonical_form together with a relabelling sigma (old -> new) achieving it.
FiniteStructure canonical_form(const FiniteStructure& s, std::vector<int>& sigma);
bool isomorphic(const FiniteStructure& a, const FiniteStructure& b);

bool is_embedding(const FiniteStructure& a, const FiniteStructure& b, const Embedding& f);

// All strong embeddings in lexicographic order of the image sequence.  A
// non-zero limit stops after that many.
std::vector<Embedding> find_embeddings(const FiniteStructure& a, const FiniteStructure& b,
                                       std::size_t limit = 0, const SearchContext& ctx = {});
std::optional<Embedding> find_first_embedding(const FiniteStructure& a, const FiniteStructure& b,
                                              const SearchContext& ctx = {});

// Structure on |map| points with R(t) iff s |= R(map(t)); map need not be sorted.
FiniteStructure pullback(const FiniteStructure& s, const std::vector<int>& map);

FiniteStructure induced_substructure(const FiniteStructure& s, std::vector<int> subset);
FiniteStructure reduct(const FiniteStructure& s, const Signature& sub);
FiniteStructure glue(const FiniteStructure& a, const FiniteStructure& b, const std::vector<int>& f);

// Structure over a new signature; relations matched by name are copied, others left empty.
FiniteStructure expand(const FiniteStructure& s, const Signature& bigger);

}  // namespace fraisse
