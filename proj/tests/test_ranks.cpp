#include <doctest.h>

#include <random>
#include <set>

#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"
#include "fraisse/ramsey.hpp"
#include "fraisse/ranks.hpp"
#include "oracle.hpp"

using namespace fraisse;

namespace {

const GenericModel& graph_target() {
    static const GenericModel g = standard_graph_target();
    return g;
}

std::vector<ClassSpec> quad_classes() { return {spec_LO(), spec_G(), spec_E(), spec_T()}; }

void check_signs(const PatternWitness& pw, const FiniteStructure& target, bool ird) {
    REQUIRE(pw.rows.size() == pw.row_tuples.size());
    for (std::size_t g = 0; g < pw.rows.size(); ++g)
        for (int i = 0; i < pw.depth; ++i)
            for (int j = 0; j < pw.length; ++j) {
                const int gi = pw.rows[g][static_cast<std::size_t>(i)];
                const bool want = ird ? gi < j : gi == j;
                const bool got = oracle::eval(pw.formulas[static_cast<std::size_t>(i)], target,
                                              {pw.row_tuples[g], pw.columns[static_cast<std::size_t>(j)]}, pw.parameters);
                CHECK(got == want);
                CHECK(pw.signs[g][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == (want ? 1 : 0));
            }
}

}  // namespace

TEST_CASE("bipartite counts") {
    BipartiteCounts c1 = bipartite_counts(1);
    CHECK(c1.total == 2);
    CHECK(c1.symmetric == 2);
    CHECK(c1.nonsymmetric == 0);
    BipartiteCounts c2 = bipartite_counts(2);
    CHECK(c2.total == 16);
    CHECK(c2.symmetric == 8);
    CHECK(c2.nonsymmetric == 8);
    BipartiteCounts c3 = bipartite_counts(3);
    CHECK(c3.total == 512);
    CHECK(c3.symmetric == 64);
    CHECK(c3.brute_checked);
    CHECK(bipartite_counts(10).total == BigInt(1) << 100);
    CHECK_THROWS_AS(bipartite_counts(0), Error);
}

TEST_CASE("code involution") {
    for (int n = 1; n <= 3; ++n) {
        const BipartiteCode all = (BipartiteCode{1} << (n * n)) - 1;
        int sym = 0;
        for (BipartiteCode g = 0; g <= all; ++g) {
            CHECK(code_star(code_star(g, n), n) == g);
            CHECK(code_symmetric(g, n) == (code_star(g, n) == g));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) CHECK(code_has(g, n, i, j) == code_has(code_star(g, n), n, j, i));
            sym += code_symmetric(g, n);
        }
        CHECK(BigInt(sym) == bipartite_counts(n).symmetric);
    }
}

TEST_CASE("S_2 of powers") {
    for (const auto& k : quad_classes())
        for (int m = 0; m <= 4; ++m) {
            INFO(k.name << " " << m);
            CHECK(s2_count(k, m) == (std::size_t{1} << m));
        }
}

TEST_CASE("quad assignment for every class and n <= 3") {
    for (const auto& k : quad_classes()) {
        for (int n = 1; n <= 3; ++n) {
            INFO(k.name << " n=" << n);
            QuadConstruction q = make_quad_construction(k, n);
            CHECK(q.m == n * n - 1);
            if (n >= 2) CHECK(q.types.size() == (std::size_t{1} << q.m));
            CHECK(q.capacity >= q.types.size());
            CHECK(check_quad_assignment(q));
            // Outputs of distinct types are disjoint.
            std::set<BipartiteCode> used;
            std::size_t total = 0;
            for (const auto& out : q.h) {
                total += out.size();
                used.insert(out.begin(), out.end());
            }
            CHECK(used.size() == total);
        }
    }
    CHECK(make_quad_construction(spec_E(), 2).capacity == 12);
    CHECK(make_quad_construction(spec_LO(), 2).capacity == 8);
    CHECK_THROWS_AS(make_quad_construction(spec_H(3), 2), Error);
    CHECK_THROWS_AS(make_quad_construction(spec_P(), 2), Error);
}

TEST_CASE("quad configurations at n = 2") {
    for (const auto& k : quad_classes()) {
        INFO(k.name);
        QuadResult r = build_quad_configuration(k, 2, graph_target(), 3);
        CHECK(r.construction.m == 3);
        REQUIRE(r.result.certificate);
        CHECK(r.result.certificate->interpretation.tuple_length == 2);
        CHECK(r.result.certificate->interpretation.parameter_free());
        CHECK(recheck_certificate(*r.result.certificate));
    }
}

TEST_CASE("R-graph realizes the assigned codes") {
    QuadConstruction q = make_quad_construction(spec_G(), 2);
    for (const auto& a : enumerate_up_to(q.index, 3)) {
        FiniteStructure r = quad_r_graph(q, a);
        CHECK(r.size() == 2 * a.size());
        CHECK(spec_G().contains(r));
        for (int x = 0; x < a.size(); ++x)
            for (int y = 0; y < a.size(); ++y) {
                if (x == y) continue;
                BipartiteCode got = 0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        if (r.holds(0, Tuple{x * 2 + i, y * 2 + j})) got |= BipartiteCode{1} << (i * 2 + j);
                const auto& allowed = q.codes_for(a, x, y);
                CHECK(std::find(allowed.begin(), allowed.end(), got) != allowed.end());
            }
    }
}

TEST_CASE("counting upper bounds") {
    CHECK(counting_upper_bound(spec_G(), 2).value == 3);
    CHECK(counting_upper_bound(spec_G(), 1).value == 1);
    CHECK(counting_upper_bound(spec_LO(), 1).value == 0);
    CHECK(counting_upper_bound(spec_LO(), 2).value == 3);
    CHECK(counting_upper_bound(spec_T(), 1).value == 0);
    CHECK(counting_upper_bound(spec_T(), 3).value == 8);
    // E is not self-similar; its bounds come from the dagger count in the rank table.
    CHECK_THROWS_AS(counting_upper_bound(spec_E(), 2), Error);
    CHECK_THROWS_AS(counting_upper_bound(spec_H(3), 2), Error);
    UpperBound g = counting_upper_bound(spec_G(), 2);
    CHECK_FALSE(g.justification.empty());
    CHECK(g.details["n"] == 2);
}

TEST_CASE("rank tables") {
    struct Row {
        ClassSpec k;
        int r1, r2;
    };
    for (const auto& row : {Row{spec_LO(), 0, 3}, Row{spec_T(), 0, 3}, Row{spec_G(), 1, 3}, Row{spec_E(), 1, 3}}) {
        INFO(row.k.name);
        auto table = compute_rank_table(row.k, 2, graph_target(), 3);
        REQUIRE(table.size() == 2);
        CHECK(table[0].exact == row.r1);
        CHECK(table[1].exact == row.r2);
        for (const auto& r : table) {
            CHECK(r.lower <= r.upper.value);
            REQUIRE(r.certificate);
            CHECK(recheck_certificate(*r.certificate));
        }
        json j = table[1].to_json(false);
        CHECK(j["exact"] == row.r2);
        CHECK(j["upper"]["m"] == row.r2);
    }
}

TEST_CASE("E box interpretation") {
    InterpretationMap b = make_E_box_interpretation(2, spec_E().signature);
    CHECK(b.tuple_length == 3);
    CHECK(to_string(b.formula("E#1")) == "0.1 = 1.1");

    FiniteStructure pair(Signature({Relation{"E", 2}}), 2);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) pair.set(0, {x, y});
    auto w = box_embedding(pair);
    REQUIRE(w.size() == 2);
    CHECK(w[0][0] == w[1][0]);
    CHECK(w[0][1] != w[1][1]);

    // Four points pairwise inequivalent in both coordinates land inside 4^3.
    ClassSpec e2 = power(spec_E(), 2);
    FiniteStructure spread(e2.signature, 4);
    for (int x = 0; x < 4; ++x) {
        spread.set(0, {x, x});
        spread.set(1, {x, x});
    }
    REQUIRE(e2.contains(spread));
    for (const auto& t : box_embedding(spread))
        for (int v : t) CHECK(v < 4);

    for (int m = 1; m <= 2; ++m) {
        GenericModel box = build_box_model(m, 3);
        ConfigResult r = build_E_box_configuration(m, box, 3);
        REQUIRE(r.certificate);
        CHECK(recheck_certificate(*r.certificate));
    }
    // Equality-only formulas work in any target with enough points.
    GenericModel g = build_generic_model(spec_G(), 1, 32);
    CHECK(build_E_box_configuration(1, g, 2).certificate.has_value());
    CHECK_THROWS_AS(build_E_box_configuration(0, build_box_model(1, 3), 2), Error);
}

TEST_CASE("box embedding is an embedding into the box model") {
    for (int m = 1; m <= 2; ++m) {
        ClassSpec em = power(spec_E(), m);
        GenericModel box = build_box_model(m, 4);
        for (const auto& a : enumerate_up_to(em, 4)) {
            auto coords = box_embedding(a);
            std::vector<int> f;
            for (const auto& c : coords) f.push_back(box_point(c, 4));
            CHECK(is_embedding(a, box.structure, f));
        }
    }
}

TEST_CASE("two-color invariant on the box model") {
    for (int n = 2; n <= 6; ++n) {
        GenericModel box = build_box_model(2, n);
        const FiniteStructure& s = box.structure;
        auto color = [&](int p) { auto c = box_coordinates(p, 2, n); return c[0] < c[1] ? 0 : 1; };
        for (int a = 0; a < s.size(); ++a) {
            if (color(a) != 0) continue;
            auto ca = box_coordinates(a, 2, n);
            std::set<int> firsts;
            for (int b = 0; b < s.size(); ++b) {
                if (color(b) != 0 || !s.holds(1, Tuple{a, b})) continue;
                auto cb = box_coordinates(b, 2, n);
                CHECK(cb[0] < ca[1]);
                firsts.insert(cb[0]);
            }
            CHECK(static_cast<int>(firsts.size()) <= ca[1]);
        }
    }
}

TEST_CASE("age indivisibility on random colorings of the box") {
    std::mt19937_64 rng(2024);
    const int n = 5;
    GenericModel box = build_box_model(2, n);
    const auto members = enumerate_up_to(power(spec_E(), 2), 3);
    int via_box = 0, via_class = 0, missing = 0;
    for (int trial = 0; trial < 100; ++trial) {
        BoxColoring c = random_point_coloring(3, n, 2, rng);
        std::optional<BoxSets> y;
        int side = 3;
        for (; side >= 1 && !y; --side) y = find_monochromatic_box(c, side);
        ++side;
        REQUIRE(y);
        const int color = c.point(Tuple{(*y)[0][0], (*y)[1][0], (*y)[2][0]});
        for (const auto& a : members) {
            auto coords = box_embedding(a);
            int need = 0;
            for (const auto& t : coords)
                for (int v : t) need = std::max(need, v + 1);
            if (need <= side) {
                std::vector<int> f;
                for (const auto& coord : coords) {
                    Tuple img;
                    for (std::size_t i = 0; i < coord.size(); ++i) img.push_back((*y)[i][static_cast<std::size_t>(coord[i])]);
                    f.push_back(box_point(img, n));
                    CHECK(c.point(img) == color);
                }
                CHECK(is_embedding(a, box.structure, f));
                ++via_box;
                continue;
            }
            // The box is too small: search each color class directly.
            bool found = false;
            for (int col = 0; col < 2 && !found; ++col) {
                std::vector<int> cls;
                for (int p = 0; p < box.structure.size(); ++p)
                    if (c.points[static_cast<std::size_t>(p)] == col) cls.push_back(p);
                found = find_first_embedding(a, induced_substructure(box.structure, cls)).has_value();
            }
            found ? ++via_class : ++missing;
        }
    }
    MESSAGE("copies via box: " << via_box << ", via color class: " << via_class << ", not found: " << missing);
    CHECK(via_box > 0);
}

TEST_CASE("E into products of orders") {
    EOrdersResult r4 = build_E_into_orders(4, build_product_order_model(4, 4), 4);
    REQUIRE(r4.result.certificate);
    CHECK(r4.type_count == 16);
    CHECK(r4.pigeonhole);
    CHECK(r4.record["types_matches"] == true);

    EOrdersResult r2 = build_E_into_orders(2, build_product_order_model(2, 4), 4);
    REQUIRE(r2.result.certificate);
    CHECK(r2.interpretation.index_spec.signature.size() == 1);
    CHECK(r2.type_count == 4);

    EOrdersResult r3 = build_E_into_orders(3, build_product_order_model(3, 4), 3);
    REQUIRE(r3.result.certificate);
    CHECK(r3.interpretation.index_spec.signature.size() == 1);
    CHECK(r3.type_count == 8);
    CHECK(recheck_certificate(*r3.result.certificate));

    CHECK_THROWS_AS(build_E_into_orders(1, build_product_order_model(1, 4), 2), Error);
}

TEST_CASE("IRD pattern from the identity of LO^2") {
    InterpretationMap id = identity_configuration(power(spec_LO(), 2));
    GenericModel model = build_product_order_model(2, 12);
    PatternWitness pw = extract_IRD_pattern(id, model, 3);
    CHECK(pw.verified);
    CHECK(pw.rows.size() == 9);
    CHECK(pw.columns.size() == 3);
    check_signs(pw, model.structure, true);

    PatternWitness one = extract_IRD_pattern(identity_configuration(spec_LO()), build_product_order_model(1, 8), 2);
    CHECK(one.verified);
    CHECK(one.rows.size() == 2);
    check_signs(one, build_product_order_model(1, 8).structure, true);
}

TEST_CASE("ICT pattern from the box interpretation") {
    GenericModel box = build_box_model(2, 4);
    InterpretationMap b = make_E_box_interpretation(2, box.structure.signature());
    WitnessSource embed = [](const FiniteStructure& a) -> std::optional<Witness> { return box_embedding(a); };
    PatternWitness pw = extract_ICT_pattern(b, box, 2, embed);
    CHECK(pw.verified);
    CHECK(pw.rows.size() == 4);
    check_signs(pw, box.structure, false);

    GenericModel box1 = build_box_model(1, 6);
    PatternWitness one = extract_ICT_pattern(make_E_box_interpretation(1, box1.structure.signature()), box1, 3, embed);
    CHECK(one.verified);
    CHECK(one.columns.size() == 3);
    check_signs(one, box1.structure, false);
}

TEST_CASE("pattern pipelines through the quad construction") {
    PipelineResult ird = quad_pattern_pipeline(spec_LO(), true, 2, 3);
    REQUIRE(ird.configuration.certificate);
    CHECK(ird.pattern.verified);
    CHECK(ird.pattern.depth == 3);
    check_signs(ird.pattern, ird.target.structure, true);

    PipelineResult ict = quad_pattern_pipeline(spec_E(), false, 2, 3);
    CHECK(ict.pattern.verified);
    CHECK(ict.pattern.depth == 3);
    check_signs(ict.pattern, ict.target.structure, false);

    CHECK_THROWS_AS(quad_pattern_pipeline(spec_LO(), false, 2, 3), Error);
}

TEST_CASE("dagger base case") {
    DaggerReport d = verify_dagger_base_case(graph_target());
    CHECK(d.pair_types == 12);
    CHECK(d.base_bound == 13);
    CHECK(d.ok());
    REQUIRE(d.claim.size() == 8);
    CHECK(d.claim[0]["n"] == 3);
    CHECK(d.claim[0]["lhs"] == 488);
    CHECK(d.claim[0]["rhs"] == 288);
    json j = d.to_json();
    CHECK(j["claim_checked_to"] == 10);
    CHECK_FALSE(d.note.empty());
}
