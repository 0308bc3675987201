#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cr/calculus.hpp"
#include "cr/conformal.hpp"

using namespace cr;

namespace {

// hatted quantity equals the given unhatted expression
bool hatEq(const std::string& src, const std::string& want,
           const std::string& sigma = "sigma", int dim = 0) {
    ParseCtx ctx;
    Expr lhs = conformalTransform(src, ctx, sigma);
    Expr rhs = parseExpr(want, ctx);
    return verifyZero(lhs - rhs, dim, {}, ctx.lg);
}

Ast prepared(const std::string& src, ParseCtx& ctx) {
    Ast a = parseAst(src, ctx);
    return expandCalls(a, ctx);
}

}  // namespace

TEST_CASE("invariant atoms") {
    CHECK(hatEq("h[a,b']", "h[a,b']"));
    CHECK(hatEq("f", "f"));
    CHECK(hatEq("D[a](f)", "D[a](f)"));
    CHECK(hatEq("D[a,b](f)", "D[a,b](f) - D[b](f)*D[a](sigma) - D[a](f)*D[b](sigma)"));
}

TEST_CASE("torsion and schouten transformations") {
    CHECK(hatEq("A[a,b]",
                "A[a,b] + i*D[b,a](sigma) - i*D[a](sigma)*D[b](sigma)"));
    CHECK(hatEq("Pab[a,b']",
                "Pab[a,b'] - (D[b',a](sigma) + D[a,b'](sigma))/2"
                " - D[^g](sigma)*D[g](sigma)*h[a,b']/2"));
    CHECK(hatEq("P", "P + Db(sigma)/2 - (n/2)*D[^g](sigma)*D[g](sigma)"));
}

TEST_CASE("reeb derivative of a scalar") {
    CHECK(hatEq("D[0](f)",
                "D[0](f) + i*D[g](sigma)*D[^g](f) - i*D[^g](sigma)*D[g](f)"));
}

TEST_CASE("raised indices lower through the levi form") {
    // nabla-hat^a f agrees with raising the hatted first derivative
    ParseCtx ctx;
    Expr a = conformalTransform("D[^a](f)", ctx);
    Expr b = parseExpr("D[^a](f)", ctx);
    CHECK(verifyZero(a - b, 0, {}, ctx.lg));
}

TEST_CASE("cocycle property") {
    for (const std::string& src :
         {std::string("A[a,b]"), std::string("Pab[a,b']"), std::string("P"),
          std::string("D[0](f)"), std::string("D[a,b'](f)")}) {
        ParseCtx ctx;
        Ast base = prepared(src, ctx);
        Ast sg = prepared("sigma", ctx);
        Ast ta = prepared("tau", ctx);
        Ast both = prepared("sigma + tau", ctx);
        Expr twoStep = flatten(conformalHat(conformalHat(base, ctx, sg), ctx, ta));
        Expr oneStep = flatten(conformalHat(base, ctx, both));
        CHECK(verifyZero(twoStep - oneStep, 0, {}, ctx.lg));
    }
}

TEST_CASE("inverse property") {
    for (const std::string& src :
         {std::string("A[a,b]"), std::string("P"), std::string("D[0](f)")}) {
        ParseCtx ctx;
        Ast base = prepared(src, ctx);
        Ast sg = prepared("sigma", ctx);
        Ast mi = prepared("-sigma", ctx);
        Expr round = flatten(conformalHat(conformalHat(base, ctx, sg), ctx, mi));
        Expr orig = flatten(base);
        CHECK(verifyZero(round - orig, 0, {}, ctx.lg));
    }
}

TEST_CASE("third order obstruction transformation") {
    // only valid in three dimensions
    ParseCtx ctx;
    Expr lhs = conformalTransform("W[a]", ctx);
    Expr rhs = parseExpr("W[a] - 3*Palpha[a](sigma)", ctx);
    CHECK(verifyZero(lhs - rhs, 1, {}, ctx.lg));
}
