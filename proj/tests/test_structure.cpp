#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "fraisse/class_spec.hpp"
#include "fraisse/completion.hpp"
#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"
#include "fraisse/json_io.hpp"

using namespace fraisse;

namespace {

Signature graph_sig() { return Signature({Relation{"E", 2}}); }
Signature order_sig() { return Signature({Relation{"<", 2}}); }

FiniteStructure graph(int n, const std::vector<std::pair<int, int>>& edges) {
    FiniteStructure g(graph_sig(), n);
    for (auto [a, b] : edges) {
        g.set(0, {a, b});
        g.set(0, {b, a});
    }
    return g;
}

FiniteStructure chain(int n) {
    FiniteStructure s(order_sig(), n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) s.set(0, {a, b});
    return s;
}

// Minimum encoding over every permutation, computed without the library.
std::vector<std::uint8_t> brute_min_encoding(const FiniteStructure& s) {
    std::vector<int> sigma(static_cast<std::size_t>(s.size()));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::vector<std::uint8_t> best;
    bool first = true;
    do {
        FiniteStructure t(s.signature(), s.size());
        for (std::size_t r = 0; r < s.signature().size(); ++r)
            for (const auto& tup : s.tuples(r)) {
                Tuple img;
                for (int v : tup) img.push_back(sigma[static_cast<std::size_t>(v)]);
                t.set(r, img);
            }
        auto enc = t.encoding();
        if (first || enc < best) best = enc;
        first = false;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return best;
}

FiniteStructure random_structure(const Signature& sig, int n, std::mt19937_64& rng) {
    FiniteStructure s(sig, n);
    std::bernoulli_distribution coin(0.4);
    for (std::size_t r = 0; r < sig.size(); ++r)
        for (std::size_t i = 0; i < s.table_size(r); ++i) s.set_at(r, i, coin(rng));
    return s;
}

// Orbit count of every labelled member under relabelling.
std::size_t brute_iso_classes(const ClassSpec& spec, int n) {
    std::set<std::vector<std::uint8_t>> seen;
    for (const auto& s : labeled_members(spec, n)) seen.insert(brute_min_encoding(s));
    return seen.size();
}

}  // namespace

TEST_CASE("canonical form examples") {
    FiniteStructure empty(graph_sig(), 0);
    CHECK(canonical_form(empty) == empty);

    FiniteStructure p1 = graph(3, {{0, 1}, {1, 2}});
    FiniteStructure p2 = graph(3, {{0, 2}, {2, 1}});
    CHECK(canonical_form(p1) == canonical_form(p2));
    CHECK(canonical_form(p1).encoding() == brute_min_encoding(p1));

    CHECK(canonical_form(graph(2, {{0, 1}})) != canonical_form(graph(2, {})));
}

TEST_CASE("canonical form is invariant under every permutation") {
    std::mt19937_64 rng(11);
    Signature two({Relation{"R", 2}, Relation{"S", 2}});
    for (int n = 0; n <= 5; ++n) {
        for (int trial = 0; trial < 3; ++trial) {
            FiniteStructure s = random_structure(n % 2 ? two : graph_sig(), n, rng);
            FiniteStructure c = canonical_form(s);
            CHECK(canonical_form(c) == c);
            CHECK(c.encoding() == brute_min_encoding(s));
            std::vector<int> sigma(static_cast<std::size_t>(n));
            std::iota(sigma.begin(), sigma.end(), 0);
            do {
                CHECK(canonical_form(permute(s, sigma)) == c);
            } while (std::next_permutation(sigma.begin(), sigma.end()));
        }
    }
}

TEST_CASE("canonical form returns a relabelling") {
    std::mt19937_64 rng(5);
    FiniteStructure s = random_structure(graph_sig(), 5, rng);
    std::vector<int> sigma;
    FiniteStructure c = canonical_form(s, sigma);
    CHECK(permute(s, sigma) == c);
    CHECK(isomorphic(s, c));
}

TEST_CASE("embedding search") {
    CHECK(find_embeddings(chain(2), chain(3)).size() == 3);
    FiniteStructure point(graph_sig(), 1);
    FiniteStructure g = graph(5, {{0, 1}, {2, 3}});
    CHECK(find_embeddings(point, g).size() == 5);
    FiniteStructure triangle = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    FiniteStructure c4 = graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    CHECK(find_embeddings(triangle, c4).empty());
    CHECK_THROWS_AS(find_embeddings(chain(2), g), Error);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        FiniteStructure a = random_structure(graph_sig(), 3, rng);
        FiniteStructure b = random_structure(graph_sig(), 5, rng);
        auto self = find_embeddings(a, a);
        CHECK(std::find(self.begin(), self.end(), Embedding{0, 1, 2}) != self.end());
        for (const auto& f : find_embeddings(a, b)) {
            std::set<int> img(f.begin(), f.end());
            CHECK(img.size() == f.size());
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y)
                    CHECK(a.holds(0, Tuple{x, y}) == b.holds(0, Tuple{f[static_cast<std::size_t>(x)], f[static_cast<std::size_t>(y)]}));
        }
    }
}

TEST_CASE("induced substructure and reduct") {
    FiniteStructure path = graph(3, {{0, 1}, {1, 2}});
    CHECK(induced_substructure(path, {0, 1, 2}) == path);
    CHECK(induced_substructure(path, {}).size() == 0);
    FiniteStructure ends = induced_substructure(path, {0, 2});
    CHECK(ends.size() == 2);
    CHECK(ends.count(0) == 0);
    CHECK_THROWS_AS(induced_substructure(path, {0, 3}), Error);

    CHECK(reduct(path, graph_sig()) == path);
    FiniteStructure bare = reduct(path, Signature());
    CHECK(bare.size() == 3);
    CHECK(bare.signature().empty());
    CHECK_THROWS_AS(reduct(path, order_sig()), Error);
}

TEST_CASE("glue") {
    FiniteStructure edge = graph(2, {{0, 1}});
    FiniteStructure c = glue(edge, chain(2), {0, 1});
    CHECK(c.signature().size() == 2);
    CHECK(c.holds(0, Tuple{0, 1}));
    CHECK(c.holds(1, Tuple{0, 1}));
    CHECK_FALSE(c.holds(1, Tuple{1, 0}));
    CHECK(reduct(c, graph_sig()) == edge);

    FiniteStructure bare(Signature(), 2);
    CHECK(reduct(glue(edge, bare, {0, 1}), graph_sig()) == edge);

    FiniteStructure none = graph(2, {});
    FiniteStructure rev(order_sig(), 2);
    rev.set(0, {1, 0});
    FiniteStructure d = glue(none, rev, {0, 1});
    CHECK(reduct(d, graph_sig()) == none);
    CHECK(reduct(d, order_sig()) == rev);

    CHECK_THROWS_AS(glue(edge, edge, {0, 1}), Error);
    CHECK_THROWS_AS(glue(edge, chain(2), {0, 0}), Error);
    CHECK_THROWS_AS(glue(edge, chain(3), {0, 1}), Error);
}

TEST_CASE("glue round trip through a permutation") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        FiniteStructure a = random_structure(graph_sig(), 4, rng);
        FiniteStructure b = random_structure(order_sig(), 4, rng);
        std::vector<int> f{0, 1, 2, 3};
        std::shuffle(f.begin(), f.end(), rng);
        FiniteStructure c = glue(a, b, f);
        CHECK(reduct(c, a.signature()) == a);
        CHECK(canonical_form(reduct(c, b.signature())) == canonical_form(b));
    }
}

TEST_CASE("enumeration counts") {
    CHECK(enumerate_structures(spec_G(), 3).size() == 4);
    CHECK(enumerate_structures(spec_LO(), 3).size() == 1);
    CHECK(enumerate_structures(spec_E(), 3).size() == 3);
    CHECK(enumerate_structures(spec_G(), 4).size() == 11);
    CHECK(enumerate_structures(spec_T(), 4).size() == 4);
    CHECK(enumerate_structures(spec_E(), 4).size() == 5);
    CHECK(enumerate_structures(spec_G(), 0).size() == 1);
}

TEST_CASE("enumeration agrees with brute force") {
    for (const auto& spec : {spec_G(), spec_LO(), spec_E(), spec_T(), spec_H(3), spec_S()}) {
        for (int n = 0; n <= 4; ++n) {
            auto fast = enumerate_structures(spec, n);
            CHECK(fast == enumerate_structures_bruteforce(spec, n));
            CHECK(fast.size() == brute_iso_classes(spec, n));
            for (const auto& s : fast) CHECK(canonical_form(s) == s);
        }
    }
    for (int n = 0; n <= 3; ++n) CHECK(enumerate_structures(parse_class("LO*G"), n).size() == brute_iso_classes(parse_class("LO*G"), n));
}

TEST_CASE("enumeration budget") {
    Budget b(10);
    SearchContext ctx{&b, 1};
    CHECK_THROWS_AS(enumerate_structures(spec_G(), 5, ctx), Error);
}

TEST_CASE("structure json round trip") {
    FiniteStructure g = graph(3, {{0, 1}});
    json j = structure_to_json(g);
    CHECK(j["relations"]["E"] == json::parse("[[0,1],[1,0]]"));
    CHECK(structure_from_json(j) == g);
    CHECK_THROWS_AS(structure_from_json(json::parse(R"({"signature":[{"name":"E","arity":2}],"size":2,"relations":{"F":[]}})")), Error);
}
