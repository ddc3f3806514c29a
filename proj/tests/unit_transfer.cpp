#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dainf/fixtures.hpp"

using namespace dainf;

TEST_CASE("zp2 fixture: B is a bidga, A a dga, phi a bidga map") {
    FixtureBundle fx = fixture_zp2(3);
    CHECK(classify(*fx.B) == AlgebraClass::bidga);
    CHECK(classify(*fx.A) == AlgebraClass::dga);
    OpCheckReport arep = check_algebra(*fx.A);
    CHECK(arep.pass());
    OpCheckReport brep = check_algebra(*fx.B);
    INFO(brep.summary());
    CHECK(brep.pass());
    OpCheckReport prep = check_morphism(fx.phi);
    INFO(prep.summary());
    CHECK(prep.pass());
    CHECK(check_twisted_complex(underlying_twisted(*fx.B)).pass());
}

TEST_CASE("zp2 fixture: vertical homology matches the published resolution") {
    FixtureBundle fx = fixture_zp2(3);
    ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
    for (int s = 0; s <= 7; ++s)
        for (int t = 0; t <= 1; ++t) {
            INFO("cell (" << s << "," << t << ")");
            CHECK(w.vh.Hv->cell_rank({s, t}) == 1);
        }
    CHECK(w.e2.equivalence);
}

TEST_CASE("zp2 transfer with published hints reproduces the worked example") {
    FixtureBundle fx = fixture_zp2(3);
    ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
    TransferResult r = transfer_minimal(w, fx.hints);
    const DAInfAlgebra& E = *r.E;
    const ModulePtr& M = E.module();

    CHECK((E.op(0, 1) == nullptr || E.op(0, 1)->is_zero_op()));

    const MultiOp* m11 = E.op(1, 1);
    REQUIRE(m11);
    const Ring& ring = E.ring();
    auto val = [&](const MultiOp* op, std::vector<std::string> in) {
        TupleKey k;
        for (auto& l : in) k.push_back(M->index_of(l));
        return op->value(k);
    };
    {
        OpVal v = val(m11, {"Y2"});
        REQUIRE(v.vec.terms.size() == 1);
        CHECK(M->label(v.vec.terms[0].first) == "x.Y1");
        CHECK(v.vec.terms[0].second == from_int(ring, 3));
        OpVal v2 = val(m11, {"x.Y2"});
        REQUIRE(v2.vec.terms.size() == 1);
        CHECK(M->label(v2.vec.terms[0].first) == "Y2");
        CHECK(v2.vec.terms[0].second == from_int(ring, 3));
    }

    CHECK((E.op(0, 3) == nullptr || op_certified_zero(*E.op(0, 3))));
    CHECK((E.op(1, 2) == nullptr || op_certified_zero(*E.op(1, 2))));
    const MultiOp* m21 = E.op(2, 1);
    REQUIRE(m21);
    for (int i = 1; i <= 3; ++i) {
        OpVal v = val(m21, {"Y" + std::to_string(i)});
        REQUIRE(v.vec.terms.size() == 1);
        CHECK(M->label(v.vec.terms[0].first) == "z.Y" + std::to_string(i - 1));
        CHECK(v.vec.terms[0].second == from_int(ring, 1));
        OpVal v2 = val(m21, {"x.Y" + std::to_string(i)});
        REQUIRE(v2.vec.terms.size() == 1);
        CHECK(M->label(v2.vec.terms[0].first) == "xz.Y" + std::to_string(i - 1));
        CHECK(v2.vec.terms[0].second == from_int(ring, 1));
    }
    for (const auto& [ij, op] : E.ops()) {
        if (ij.first + ij.second < 4) continue;
        INFO("op (" << ij.first << "," << ij.second << ")");
        CHECK(op_certified_zero(op));
    }

    for (const auto& [ij, op] : fx.expected_E->ops()) {
        const MultiOp* got = E.op(ij.first, ij.second);
        REQUIRE(got);
        INFO("expected op (" << ij.first << "," << ij.second << ")");
        CHECK(ops_agree(*got, op, true));
    }

    OpCheckReport erep = check_algebra(E);
    INFO(erep.summary());
    CHECK(erep.pass());
    OpCheckReport frep = check_morphism(r.f);
    INFO(frep.summary());
    CHECK(frep.pass());

    TwistedMap tm;
    tm.source = underlying_twisted(E);
    tm.target = underlying_twisted(*fx.B);
    for (const auto& [pq, op] : r.f.comps())
        if (pq.second == 1) tm.set_comp(pq.first, multiop_to_graded(op));
    CHECK(e2_and_equivalence(tm).equivalence);
}

TEST_CASE("zp2 transfer is idempotent under extracted hints") {
    FixtureBundle fx = fixture_zp2(3);
    ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
    TransferResult r1 = transfer_minimal(w, fx.hints);
    TransferHints again = extract_hints(r1);
    TransferResult r2 = transfer_minimal(w, again);
    for (const auto& [ij, op] : r1.E->ops()) {
        const MultiOp* other = r2.E->op(ij.first, ij.second);
        REQUIRE(other);
        CHECK(op.equal_to(*other));
    }
    CHECK(r1.f.equal_to(r2.f));
    CHECK(r1.section.equal_to(r2.section));
}

TEST_CASE("ext fixture: structures pass their checks") {
    for (long p : {2L, 5L}) {
        FixtureBundle fx = fixture_ext(p);
        CHECK(classify(*fx.B) == AlgebraClass::bidga);
        OpCheckReport arep = check_algebra(*fx.A);
        INFO(arep.summary());
        CHECK(arep.pass());
        OpCheckReport brep = check_algebra(*fx.B);
        INFO(brep.summary());
        CHECK(brep.pass());
        OpCheckReport prep = check_morphism(fx.phi);
        INFO(prep.summary());
        CHECK(prep.pass());
    }
}

TEST_CASE("ext transfer reproduces the published minimal model") {
    for (long p : {2L, 3L, 5L}) {
        FixtureBundle fx = fixture_ext(p);
        ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
        TransferResult r = transfer_minimal(w, fx.hints);
        const DAInfAlgebra& E = *r.E;
        const ModulePtr& M = E.module();
        const Ring& ring = E.ring();

        const MultiOp* m11 = E.op(1, 1);
        REQUIRE(m11);
        OpVal vb = m11->value({M->index_of("b")});
        REQUIRE(vb.vec.terms.size() == 1);
        CHECK(M->label(vb.vec.terms[0].first) == "I");
        CHECK(vb.vec.terms[0].second == from_int(ring, p));
        OpVal vab = m11->value({M->index_of("ab")});
        REQUIRE(vab.vec.terms.size() == 1);
        CHECK(M->label(vab.vec.terms[0].first) == "a");
        CHECK(vab.vec.terms[0].second == from_int(ring, p));

        const MultiOp* m12 = E.op(1, 2);
        REQUIRE(m12);
        auto entry = [&](const char* x, const char* y) { return m12->value({M->index_of(x), M->index_of(y)}); };
        auto is_single = [&](const OpVal& v, const char* lbl, long c) {
            return v.vec.terms.size() == 1 && M->label(v.vec.terms[0].first) == lbl &&
                   v.vec.terms[0].second == from_int(ring, c);
        };
        CHECK(is_single(entry("a", "b"), "I", 1));
        CHECK(is_single(entry("a", "ab"), "a", 1));
        CHECK(is_single(entry("ab", "b"), "b", -1));
        CHECK(is_single(entry("ab", "ab"), "ab", -1));
        CHECK(entry("b", "a").vec.empty());
        CHECK(entry("b", "ab").vec.empty());
        CHECK(entry("ab", "a").vec.empty());
        CHECK(entry("a", "a").vec.empty());

        for (const auto& [ij, op] : fx.expected_E->ops()) {
            const MultiOp* got = E.op(ij.first, ij.second);
            REQUIRE(got);
            INFO("expected ext op (" << ij.first << "," << ij.second << ") p=" << p);
            CHECK(ops_agree(*got, op, true));
        }
        for (const auto& [ij, op] : E.ops()) {
            if (fx.expected_E->op(ij.first, ij.second)) continue;
            INFO("extra op (" << ij.first << "," << ij.second << ")");
            CHECK(op_certified_zero(op));
        }

        OpCheckReport erep = check_algebra(E);
        INFO(erep.summary());
        CHECK(erep.pass());
        OpCheckReport frep = check_morphism(r.f);
        INFO(frep.summary());
        CHECK(frep.pass());
    }
}

TEST_CASE("ext: the alternative f_{11}(ab) changes m_{12}, and compare verifies an equivalence") {
    FixtureBundle fx = fixture_ext(5);
    ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
    TransferResult r1 = transfer_minimal(w, fx.hints);
    TransferResult r2 = transfer_minimal(w, fx.alt_hints);
    const ModulePtr& M = r2.E->module();
    const MultiOp* m12 = r2.E->op(1, 2);
    REQUIRE(m12);
    auto entry = [&](const char* x, const char* y) { return m12->value({M->index_of(x), M->index_of(y)}); };
    CHECK(entry("a", "b").vec.empty());
    CHECK(!entry("b", "a").vec.empty());
    CHECK(!m12->equal_to(*r1.E->op(1, 2)));

    DAInfMorphism id_alpha = DAInfMorphism::identity(fx.B);
    CompareResult cmp = compare_minimal(id_alpha, r1, r2);
    OpCheckReport brep = check_morphism(cmp.beta);
    INFO(brep.summary());
    CHECK(brep.pass());
    OpCheckReport hrep = check_homotopy(cmp.h);
    INFO(hrep.summary());
    CHECK(hrep.pass());
    CHECK(cmp.obstruction_checks > 0);

    TwistedMap tm;
    tm.source = underlying_twisted(*r1.E);
    tm.target = underlying_twisted(*r2.E);
    bool has0 = false;
    for (const auto& [pq, op] : cmp.beta.comps())
        if (pq.second == 1) {
            tm.set_comp(pq.first, multiop_to_graded(op));
            if (pq.first == 0) has0 = true;
        }
    REQUIRE(has0);
    CHECK(e2_and_equivalence(tm).equivalence);
}

TEST_CASE("compare against itself gives the identity and a zero homotopy") {
    FixtureBundle fx = fixture_zp2(3);
    ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
    TransferResult r = transfer_minimal(w, fx.hints);
    DAInfMorphism id_alpha = DAInfMorphism::identity(fx.B);
    CompareResult cmp = compare_minimal(id_alpha, r, r);
    CHECK(morphisms_agree(cmp.beta, DAInfMorphism::identity(r.E)));
    for (const auto& [ij, op] : cmp.h.comps()) {
        INFO("homotopy comp (" << ij.first << "," << ij.second << ")");
        CHECK(op_certified_zero(op));
    }
    CHECK(check_homotopy(cmp.h).pass());
}

TEST_CASE("formal fixture transfers to itself") {
    FixtureBundle fx = fixture_formal();
    ResolutionWitness w = verify_e1_resolution(fx.B, fx.A, fx.phi);
    TransferResult r = transfer_minimal(w, fx.hints);
    for (const auto& [ij, op] : r.E->ops()) {
        if (ij == std::make_pair(0, 2)) continue;
        CHECK(op.is_zero_op());
    }
    CHECK(r.E->op(0, 2)->equal_to(*fx.expected_E->op(0, 2)));
}

TEST_CASE("freeness failure surfaces for a dga with torsion homology") {
    Ring ring = Ring::integers();
    SupportBox box{0, 0, 1};
    BigradedModule::Builder b(ring, box, false);
    b.add("1", 0, 0).add("w", 0, 1);
    ModulePtr M = b.build();
    Truncation tr;
    tr.box = box;
    tr.arity_max = 4;
    auto A = std::make_shared<DAInfAlgebra>(M, "1", tr);
    MultiOp d = MultiOp::uniform(M, 1, M, 0, 1);
    SparseVec two;
    two.add_term(ring, M->index_of("1"), from_int(ring, 2));
    d.set_value({M->index_of("w")}, std::move(two));
    A->set_op(0, 1, std::move(d));
    MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
    Index one = M->index_of("1"), ww = M->index_of("w");
    mu.set_value({one, one}, unit_vec(one));
    mu.set_value({one, ww}, unit_vec(ww));
    mu.set_value({ww, one}, unit_vec(ww));
    A->set_op(0, 2, std::move(mu));
    CHECK_THROWS_AS(verify_e1_resolution(A, A, DAInfMorphism::identity(A)), FreenessFailure);
}
