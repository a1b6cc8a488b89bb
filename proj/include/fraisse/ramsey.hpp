#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <optional>
#include <random>

#include "fraisse/json_io.hpp"
#include "fraisse/search.hpp"

namespace fraisse {

// Entries in {-1, 0, 1}; the first nonzero entry is 1.
using Direction = std::vector<int>;

// D_k in lexicographic order (-1 < 0 < 1), the zero direction first.
std::vector<Direction> enumerate_directions(int k);
bool leq_t(const Tuple& a, const Tuple& b, const Direction& t);
bool leq_lex(const Tuple& a, const Tuple& b);
// The unique t with a <=_t b; a <=_lex b required.
Direction direction_of(const Tuple& a, const Tuple& b);

// Colorings of n^k, points numbered row-major (coordinate 0 most significant).
struct BoxColoring {
    int k = 1;
    int n = 0;
    int colors = 1;
    std::vector<int> points;  // n^k entries, may be empty for a pure pair map
    std::vector<int> pairs;   // N*N entries at a*N + b with a <= b; a == b is the singleton

    int volume() const;
    bool has_pairs() const { return !pairs.empty(); }
    int point(const Tuple& x) const;
    int pair(int a, int b) const;  // any order
    Tuple coords(int index) const;
    int index(const Tuple& x) const;
    void validate() const;
};

BoxColoring random_point_coloring(int k, int n, int colors, std::mt19937_64& rng);
BoxColoring random_pair_coloring(int k, int n, int colors, std::mt19937_64& rng);
BoxColoring constant_coloring(int k, int n, bool pairs);

// Y_0 .. Y_{k-1}, each sorted.
using BoxSets = std::vector<std::vector<int>>;

// Color-major, then the lexicographically first (Y_0, ..., Y_{k-1}).  nullopt
// means no box exists.
std::optional<BoxSets> find_monochromatic_box(const BoxColoring& c, int m, const SearchContext& ctx = {});
std::optional<BoxSets> find_monochromatic_directed_box(const BoxColoring& c, int m, const SearchContext& ctx = {});
bool box_constant(const BoxColoring& c, const BoxSets& y);
bool directed_box_constant(const BoxColoring& c, const BoxSets& y);

enum class BoxKind { Point, Directed };

// N such that every coloring of binom(N, <= 2) with `colors` colors has an m-set
// constant on singletons and constant on pairs.
using ClassicalBound = std::function<boost::multiprecision::cpp_int(const boost::multiprecision::cpp_int& colors, int m)>;

// (R - 1) * colors + 1 where R is the multicolor Erdos-Szekeres bound
// (colors (m - 1))! / ((m - 1)!)^colors for pairs (R = m when m <= 2).
boost::multiprecision::cpp_int default_classical_bound(const boost::multiprecision::cpp_int& colors, int m);

// Point kind follows the pigeonhole induction; directed kind the recursion
// with l' = l^(2|D_k|) and l'' = l^(n'^2).
boost::multiprecision::cpp_int box_ramsey_upper_bound(int k, int colors, int m, BoxKind kind,
                                                      const ClassicalBound& classical = default_classical_bound);

json coloring_to_json(const BoxColoring& c);
// Accepts {"k","n","colors","points","pairs"}, a bare row-major array (k from
// the argument) or a bare pair map {"[a,b]": color}.
BoxColoring coloring_from_json(const json& j, int k = 1);
json box_to_json(const BoxSets& y);

}  // namespace fraisse
