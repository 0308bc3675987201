#pragma once

// Three-slot CR tractor sections, the tractor connection, the tractor-D
// operator, and the fourth order invariant operator extracted from them.

#include "cr/calculus.hpp"

namespace cr {

struct SideConditionFailed : std::runtime_error {
    explicit SideConditionFailed(const std::string& m) : std::runtime_error(m) {}
};

// Section of E(1,0) + E_a(1,0) + E(0,-1), possibly twisted by a weight
// offset (w, wp).  Slots are expression trees; the middle slot carries the
// free lowered holomorphic index midIdx.  The topmost nonvanishing slot is
// the invariant part (recorded property, not enforced).
struct TractorSection {
    Ast top, mid, bot;
    Index midIdx;
    Coeff w{0}, wp{0};
};

// slotwise tractor connection in direction d: a lowered holomorphic or
// antiholomorphic index, or the Reeb direction
TractorSection tractorDeriv(const TractorSection& s, const Index& d, ParseCtx& ctx);

// tractor-D of a scalar expression of declared weight (w, wp)
TractorSection tractorD(const Ast& f, const Coeff& w, const Coeff& wp, ParseCtx& ctx);

// the two intermediate sections entering the invariant fourth order operator
TractorSection tractorLaplacian(const TractorSection& s, ParseCtx& ctx);

// bottom slot, times 4, of
//   -(nabla^b nabla_b + i(w-1) nabla_0 + (w-1)(1+(wp-w+1)/(n+2)) P) D_A f
// at w = wp = -(n-1)/2; throws SideConditionFailed unless the top and middle
// slots close to zero
Expr extractPaneitz(const std::string& scalar, ParseCtx& ctx);

struct AssemblyReport {
    bool ok = false;
    Expr residual;
};

// Assemble the fourth order operator from the circle bundle pushforward
// formulas and compare with its direct definition.  The tabulated gradient
// coefficient is inconsistent with the Bianchi identity by a factor of -4;
// the default report keeps it and emits the residual verbatim, while
// correctedGradientTerm swaps in the Bianchi-consistent value.
AssemblyReport feffermanAssembly(ParseCtx& ctx, bool correctedGradientTerm = false);

}  // namespace cr
