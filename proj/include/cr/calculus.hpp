#pragma once

// Rewriting layer on top of the tensor core: commutator-based normal
// ordering, the contracted Bianchi rules, geometric constraint rewriting
// (CR pluriharmonic arguments, pseudo-Einstein contact forms), operator
// macro expansion, and the full verification closure.

#include "cr/expr.hpp"
#include "cr/parse.hpp"

namespace cr {

struct Constraint {
    enum Kind { Pluriharmonic, PseudoEinstein } kind;
    int sym = -1;  // constrained scalar for Pluriharmonic
};

Constraint pluriharmonic(const std::string& scalar);
Constraint pseudoEinstein();

// Move derivative prefixes toward the normal order
// [reeb..., antiholomorphic..., holomorphic...] (outermost first) with the
// Lee commutator rules.  Pairs whose commutator is outside the supported
// fragment but of tail rank <= 1 are left in place; tail rank >= 2 throws
// UnsupportedRank.  alt selects an alternate (rightmost-first) strategy,
// used by the confluence tests.
Expr normalOrder(const Expr& e, int dim, LabelGen& lg, bool alt = false);

// contracted Bianchi rewrites: the Schouten divergence rule and nabla_0 of
// the Schouten trace
Expr applyBianchi(const Expr& e, int dim, LabelGen& lg);

// one sweep of constraint substitutions
Expr applyConstraints(const Expr& e, const std::vector<Constraint>& cs, int dim,
                      LabelGen& lg);

// iterate normalize / normalOrder / bianchi / constraints to a fixpoint
Expr closure(Expr e, int dim, const std::vector<Constraint>& cs, LabelGen& lg,
             int maxIter = 80);

bool verifyZero(const Expr& e, int dim, const std::vector<Constraint>& cs,
                LabelGen& lg);

// n -> n0 specialization; throws PoleAtLimit on a genuine pole
Expr limitN(const Expr& e, const Rat& n0);
// is every coefficient's numerator divisible by (n - root)^k ?
bool divisibleBy(const Expr& e, const Rat& root, int k);

// macro expansion for operator calls (P4, Db, Palpha, ...)
Ast expandCallsImpl(const Ast& a, ParseCtx& ctx);

}  // namespace cr
