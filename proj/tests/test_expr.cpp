#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cr/expr.hpp"

using namespace cr;

namespace {
Index lH(int l) { return idx(Fam::Holo, false, l); }
Index uH(int l) { return idx(Fam::Holo, true, l); }
Index lA(int l) { return idx(Fam::Anti, false, l); }
Index uA(int l) { return idx(Fam::Anti, true, l); }

Term term(Coeff c, std::vector<Factor> fs) { return Term{std::move(c), std::move(fs)}; }
}  // namespace

TEST_CASE("registry basics") {
    const auto& reg = Registry::get();
    CHECK(reg.id("h") == SYM_H);
    CHECK(reg.id("Rm") == SYM_RM);
    CHECK(reg.id("nosuch") == -1);
    CHECK(reg.group(SYM_RM).size() == 4);  // pair exchanges
    CHECK(reg.group(SYM_A).size() == 2);
    CHECK(reg.decl(SYM_H).parallel);
}

TEST_CASE("direction classes") {
    CHECK(dirClass(reebIdx()) == 0);
    CHECK(dirClass(lH(0)) == 2);
    CHECK(dirClass(uA(0)) == 2);
    CHECK(dirClass(uH(0)) == 1);
    CHECK(dirClass(lA(0)) == 1);
    CHECK(isHoloType(lH(0)));
    CHECK(isHoloType(uA(0)));
    CHECK(!isHoloType(uH(0)));
}

TEST_CASE("conjugation is an involution") {
    Factor a{SYM_A, false, {uH(7)}, {lH(1), lH(7)}};
    Expr e = exprTerm(term(Coeff::i(), {a}));
    Expr cc = conjugate(conjugate(e));
    CHECK(normalize(e - cc, 0).terms.empty());
    // single conjugation differs
    CHECK(!normalize(e - conjugate(e), 0).terms.empty());
}

TEST_CASE("levi trace gives n") {
    Factor h{SYM_H, false, {}, {lH(3), uH(3)}};
    Factor f{scalarId("f"), false, {}, {}};
    Expr e = exprTerm(term(Coeff(1), {h, f}));
    Expr r = normalize(e, 0);
    REQUIRE(r.terms.size() == 1);
    CHECK(r.terms[0].c == Coeff::n());
    Expr r3 = normalize(e, 3);
    CHECK(r3.terms[0].c == Coeff(3));
}

TEST_CASE("levi contraction relabels the partner") {
    // h[a, ^g] * A[g, b] == A with g replaced by a
    Factor h{SYM_H, false, {}, {lH(1), uH(9)}};
    Factor a{SYM_A, false, {}, {lH(9), lH(2)}};
    Expr e = exprTerm(term(Coeff(1), {h, a}));
    Factor expect{SYM_A, false, {}, {lH(1), lH(2)}};
    Expr want = exprTerm(term(Coeff(1), {expect}));
    CHECK(normalize(e - want, 0).terms.empty());
}

TEST_CASE("hermitian folding") {
    // conj(Pab)[b', a] folds to Pab[a, b'] via the hermitian permutation
    Factor pc{SYM_PAB, true, {}, {lA(2), lH(1)}};
    Factor p{SYM_PAB, false, {}, {lH(1), lA(2)}};
    Expr diff = exprTerm(term(Coeff(1), {pc})) - exprTerm(term(Coeff(1), {p}));
    CHECK(normalize(diff, 0).terms.empty());
    // torsion is not hermitian: conj persists
    Factor ac{SYM_A, true, {}, {lA(1), lA(2)}};
    Expr r = normalize(exprTerm(term(Coeff(1), {ac})), 0);
    REQUIRE(r.terms.size() == 1);
    CHECK(r.terms[0].fs[0].cj);
}

TEST_CASE("torsion slot symmetry merges") {
    Factor a1{SYM_A, false, {}, {lH(1), lH(2)}};
    Factor a2{SYM_A, false, {}, {lH(2), lH(1)}};
    Expr diff = exprTerm(term(Coeff(1), {a1})) - exprTerm(term(Coeff(1), {a2}));
    CHECK(normalize(diff, 0).terms.empty());
}

TEST_CASE("curvature trace gives the Ricci decomposition") {
    // Rm[a, b', g, ^g] -> (n+2) Pab[a,b'] + P h[a,b']
    Factor rm{SYM_RM, false, {}, {lH(1), lA(2), lH(9), uH(9)}};
    Expr e = exprTerm(term(Coeff(1), {rm}));
    Factor pab{SYM_PAB, false, {}, {lH(1), lA(2)}};
    Factor p{SYM_P, false, {}, {}};
    Factor h{SYM_H, false, {}, {lH(1), lA(2)}};
    Expr want = exprTerm(term(Coeff(RatFn(Poly(std::vector<Rat>{2, 1}))), {pab})) +
                exprTerm(term(Coeff(1), {p, h}));
    CHECK(normalize(e - want, 0).terms.empty());
}

TEST_CASE("dimension one forces trace form") {
    Factor pab{SYM_PAB, false, {}, {lH(1), lA(2)}};
    Factor p{SYM_P, false, {}, {}};
    Factor h{SYM_H, false, {}, {lH(1), lA(2)}};
    Expr diff = exprTerm(term(Coeff(1), {pab})) - exprTerm(term(Coeff(1), {p, h}));
    CHECK(normalize(diff, 1).terms.empty());
    CHECK(!normalize(diff, 2).terms.empty());

    Factor rm{SYM_RM, false, {}, {lH(1), lA(2), lH(3), lA(4)}};
    Factor h2{SYM_H, false, {}, {lH(3), lA(4)}};
    Expr diff2 = exprTerm(term(Coeff(1), {rm})) -
                 exprTerm(term(Coeff(4), {p, h, h2}));
    CHECK(normalize(diff2, 1).terms.empty());
}

TEST_CASE("dummy relabeling merges alpha-equivalent terms") {
    Factor a1{SYM_A, false, {}, {lH(11), lH(12)}};
    Factor b1{SYM_A, true, {}, {uH(11), uH(12)}};
    Factor a2{SYM_A, false, {}, {lH(21), lH(22)}};
    Factor b2{SYM_A, true, {}, {uH(22), uH(21)}};
    Expr diff = exprTerm(term(Coeff(1), {a1, b1})) - exprTerm(term(Coeff(1), {b2, a2}));
    CHECK(normalize(diff, 0).terms.empty());
}

TEST_CASE("derivatives obey the product rule and skip parallel factors") {
    Factor f{scalarId("f"), false, {}, {}};
    Factor g{scalarId("g"), false, {}, {}};
    Factor h{SYM_H, false, {}, {lH(5), lA(6)}};
    Expr e = exprTerm(term(Coeff(1), {f, g, h}));
    Expr d = applyDeriv(lH(1), e);
    CHECK(d.terms.size() == 2);  // h untouched
    for (const auto& t : d.terms) {
        int withD = 0;
        for (const auto& fac : t.fs) withD += !fac.deriv.empty();
        CHECK(withD == 1);
    }
}

TEST_CASE("weights") {
    Factor p{SYM_P, false, {}, {}};
    CHECK(termWeight(term(Coeff(1), {p})) == RatFn(-1));
    Factor rm{SYM_RM, false, {}, {lH(1), lA(2), lH(3), lA(4)}};
    CHECK(termWeight(term(Coeff(1), {rm})) == RatFn(1));
    Factor a{SYM_A, false, {uH(9)}, {lH(1), lH(9)}};  // one raised derivative
    CHECK(termWeight(term(Coeff(1), {a})) == RatFn(-1));
    Factor f{scalarId("f"), false, {reebIdx()}, {}};
    CHECK(termWeight(term(Coeff(1), {f})) == RatFn(-1));
}

TEST_CASE("validation rejects malformed contractions") {
    Factor bad{SYM_A, false, {}, {lH(1), lH(1)}};  // same position pairing
    CHECK_THROWS_AS(validateTerm(term(Coeff(1), {bad})), ExprError);
    Factor ok{SYM_A, false, {uH(1)}, {lH(1), lH(2)}};
    CHECK_NOTHROW(validateTerm(term(Coeff(1), {ok})));
}

TEST_CASE("prefix commutation variants are identified") {
    // scalar second derivatives in the same direction commute:
    // D[a,b](f) and D[b,a](f) canonicalize identically
    Factor f1{scalarId("f"), false, {lH(1), lH(2)}, {}};
    Factor f2{scalarId("f"), false, {lH(2), lH(1)}, {}};
    Expr diff = exprTerm(term(Coeff(1), {f1})) - exprTerm(term(Coeff(1), {f2}));
    CHECK(normalize(diff, 0).terms.empty());
    // but not over a rank-one tail
    Factor g1{scalarId("f"), false, {lH(1), lH(2), lH(3)}, {}};
    Factor g2{scalarId("f"), false, {lH(2), lH(1), lH(3)}, {}};
    Expr diff2 = exprTerm(term(Coeff(1), {g1})) - exprTerm(term(Coeff(1), {g2}));
    CHECK(!normalize(diff2, 0).terms.empty());
}
