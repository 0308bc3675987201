#pragma once

#include "cr/parse.hpp"

namespace cr {

// Conformal change of contact form, theta -> e^{2 sigma} theta.  conformalHat
// rewrites an expression built from the calculus atoms into the corresponding
// hatted quantity, expressed entirely in the unhatted calculus (density
// components; no exponential factors).  sigma may be any scalar expression.
//
// Supported: h (invariant), A, Pab, P (and R via the parser alias), scalar
// functions (invariant), covariant derivatives of arbitrary rank tensors in
// the holomorphic and antiholomorphic directions, and the Reeb derivative of
// scalars.  Rm and Reeb derivatives of positive rank tensors are rejected.
Ast conformalHat(const Ast& a, ParseCtx& ctx, const Ast& sigma);

// parse + expand macros + hat + flatten
Expr conformalTransform(const std::string& src, ParseCtx& ctx,
                        const std::string& sigma = "sigma");

}  // namespace cr
