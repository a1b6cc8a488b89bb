#include <doctest.h>

#include <set>

#include "fraisse/classes.hpp"
#include "fraisse/completion.hpp"
#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"

using namespace fraisse;

namespace {

FiniteStructure all_structures_at(const Signature& sig, int n, std::size_t code) {
    FiniteStructure s(sig, n);
    std::size_t bit = 0;
    for (std::size_t r = 0; r < sig.size(); ++r)
        for (std::size_t i = 0; i < s.table_size(r); ++i) s.set_at(r, i, (code >> bit++) & 1u);
    return s;
}

std::size_t table_bits(const Signature& sig, int n) {
    FiniteStructure s(sig, n);
    std::size_t bits = 0;
    for (std::size_t r = 0; r < sig.size(); ++r) bits += s.table_size(r);
    return bits;
}

}  // namespace

TEST_CASE("relation properties") {
    FiniteStructure cyc(Signature({Relation{"T", 2}}), 3);
    cyc.set(0, {0, 1});
    cyc.set(0, {1, 2});
    cyc.set(0, {2, 0});
    CHECK(check_relation_property(cyc, "T", Property::Trichotomous));
    CHECK_FALSE(check_relation_property(cyc, "T", Property::Transitive));

    FiniteStructure loop(Signature({Relation{"E", 2}}), 2);
    loop.set(0, {0, 0});
    CHECK_FALSE(check_relation_property(loop, "E", Property::Irreflexive));

    for (const auto& e : enumerate_up_to(spec_E(), 4)) {
        CHECK(check_relation_property(e, "E", Property::Symmetric));
        CHECK(check_relation_property(e, "E", Property::Reflexive));
        CHECK(check_relation_property(e, "E", Property::Transitive));
    }
    CHECK_THROWS_AS(check_relation_property(loop, "F", Property::Symmetric), Error);
    FiniteStructure tern(Signature({Relation{"H", 3}}), 2);
    CHECK_THROWS_AS(check_relation_property(tern, "H", Property::Transitive), Error);
}

TEST_CASE("trichotomy on arity 3 means one ordering per set") {
    FiniteStructure t(Signature({Relation{"R", 3}}), 3);
    t.set(0, {0, 1, 2});
    CHECK(check_relation_property(t, "R", Property::Trichotomous));
    t.set(0, {1, 0, 2});
    CHECK_FALSE(check_relation_property(t, "R", Property::Trichotomous));
}

TEST_CASE("superposition") {
    ClassSpec los = superpose(spec_LO(), spec_S());
    CHECK(los.signature == spec_LO().signature);
    for (int n = 0; n <= 4; ++n) {
        const std::size_t bits = table_bits(los.signature, n);
        for (std::size_t code = 0; code < (std::size_t{1} << bits); ++code) {
            FiniteStructure s = all_structures_at(los.signature, n, code);
            CHECK(los.contains(s) == spec_LO().contains(s));
        }
    }

    ClassSpec gg = power(spec_G(), 2);
    CHECK(gg.signature[0].name == "E#0");
    CHECK(gg.signature[1].name == "E#1");
    FiniteStructure s(gg.signature, 2);
    s.set(0, {0, 1});
    s.set(0, {1, 0});
    CHECK(gg.contains(s));
    s.set(1, {0, 1});
    CHECK_FALSE(gg.contains(s));

    ClassSpec lo2 = parse_class("LO^2");
    CHECK(lo2.signature.size() == 2);
    CHECK(enumerate_structures(lo2, 2).size() == 2);
    CHECK(enumerate_structures(lo2, 3).size() == 6);
}

TEST_CASE("class expressions") {
    CHECK(parse_class("LO*G").signature.size() == 2);
    CHECK(parse_class("E^2").name == "E^2");
    CHECK(parse_class("(LO^2)*S").signature.size() == 2);
    CHECK(parse_class("H3").signature[0].arity == 3);
    CHECK_THROWS_AS(parse_class("LO*"), Error);
    CHECK_THROWS_AS(parse_class("Q"), Error);
}

TEST_CASE("class axioms for built-ins and superpositions") {
    std::vector<ClassSpec> singles = {spec_S(), spec_LO(), spec_E(), spec_G(), spec_T(), spec_H(3)};
    std::vector<ClassSpec> specs = singles;
    for (const auto& k : singles) specs.push_back(superpose(k, k));
    for (const auto& k : specs) {
        for (Axiom a : {Axiom::Hereditary, Axiom::JointEmbedding, Axiom::StrongAmalgamation}) {
            INFO(k.name << " " << axiom_name(a));
            CHECK(verify_class_axioms(k, 3, a).verdict == Verdict::Verified);
        }
    }
    CHECK(verify_class_axioms(spec_LO(), 3, Axiom::Amalgamation).verified());
}

TEST_CASE("unary P fails strong joint embedding") {
    VerificationReport r = verify_class_axioms(spec_P(), 1, Axiom::StrongAmalgamation);
    CHECK(r.verdict == Verdict::Refuted);
    CHECK(r.witness["A"]["size"] == 0);
    CHECK(r.witness["B0"]["relations"]["P"].size() == 1);
    CHECK(r.witness["B1"]["relations"]["P"].size() == 1);
    CHECK(verify_class_axioms(spec_P(), 3, Axiom::Hereditary).verified());
}

TEST_CASE("property preservation under superposition") {
    CHECK(check_property_preservation(spec_G(), spec_G(), Property::Symmetric, 4).verified());
    CHECK(check_property_preservation(spec_LO(), spec_LO(), Property::Trichotomous, 4).verified());
    CHECK(check_property_preservation(spec_E(), spec_E(), Property::Transitive, 4).verified());
}

TEST_CASE("full relationality") {
    CHECK(check_fully_relational(spec_LO(), 2, 2).verified());
    VerificationReport lo2 = check_fully_relational(power(spec_LO(), 2), 2, 2);
    CHECK(lo2.verified());
    CHECK(lo2.witness.size() == 4);
    CHECK(check_fully_relational(spec_E(), 2, 2).verified());
    CHECK(check_fully_relational(spec_G(), 2, 2).verified());
    CHECK(check_fully_relational(spec_H(3), 3, 3).verified());
}

TEST_CASE("self-similarity verdicts at bound 3") {
    for (const auto& k : {spec_LO(), spec_G(), spec_T(), spec_H(3), power(spec_LO(), 2), power(spec_G(), 2)}) {
        INFO(k.name);
        CHECK(check_self_similarity(k, 3).verified());
    }
    VerificationReport e = check_self_similarity(spec_E(), 3);
    REQUIRE(e.verdict == Verdict::Refuted);
    // p is the type of the new last point over A: it must be E-related to some a and distinct from it.
    const json& p = e.witness["p"];
    const int x = p["size"].get<int>() - 1;
    bool linked = false;
    for (const auto& t : p["relations"]["E"])
        if (t[0] == x && t[1] != x) linked = true;
    CHECK(linked);
}

TEST_CASE("pair types") {
    CHECK(enumerate_pair_types(spec_G()).size() == 2);
    CHECK(enumerate_pair_types(power(spec_LO(), 3)).size() == 8);
    CHECK(enumerate_pair_types(power(spec_E(), 2)).size() == 4);
    for (const auto& k : {spec_LO(), spec_E(), spec_G(), spec_T()})
        for (int m = 1; m <= 4; ++m) CHECK(enumerate_pair_types(power(k, m)).size() == (std::size_t{1} << m));
    CHECK_THROWS_AS(enumerate_pair_types(spec_H(3)), Error);
}

TEST_CASE("pair type involution") {
    for (const auto& k : {power(spec_LO(), 2), power(spec_G(), 2), parse_class("LO*E")}) {
        auto types = enumerate_pair_types(k);
        std::set<PairType> all(types.begin(), types.end());
        for (const auto& p : types) {
            CHECK(p.star().star() == p);
            CHECK(all.count(p.star()) == 1);
            bool symmetric_pattern = true;
            for (std::size_t r = 0; r < p.atoms.size(); ++r) symmetric_pattern = symmetric_pattern && p.holds(r, 0, 1) == p.holds(r, 1, 0);
            CHECK((p.star() == p) == symmetric_pattern);
        }
    }
}

TEST_CASE("invalid bounds") {
    CHECK_THROWS_AS(verify_class_axioms(spec_G(), 0, Axiom::Hereditary), Error);
    CHECK_THROWS_AS(check_self_similarity(spec_G(), 1), Error);
}
