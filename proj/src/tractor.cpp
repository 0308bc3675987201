#include "cr/tractor.hpp"

#include <utility>
#include <vector>

namespace cr {

namespace {

Index loH(int g) { return idx(Fam::Holo, false, g); }
Index upH(int g) { return idx(Fam::Holo, true, g); }

void relabel(Ast& a, const Index& from, const Index& to) {
    if (a.kind == Ast::Atom)
        for (auto& s : a.atom.slots)
            if (s == from) s = to;
    for (auto& d : a.dv)
        if (d == from) d = to;
    for (auto& c : a.ch) relabel(c, from, to);
}

Ast call(std::string name, std::vector<Index> dv, std::vector<Ast> args = {}) {
    Ast c;
    c.kind = Ast::Call;
    c.call = std::move(name);
    c.dv = std::move(dv);
    c.ch = std::move(args);
    return c;
}

Ast atomP() { return astSym("P", {}); }

Coeff iOverN2() { return Coeff::i() / (Coeff::n() + Coeff(2)); }

}  // namespace

TractorSection tractorDeriv(const TractorSection& s, const Index& d, ParseCtx& ctx) {
    TractorSection r;
    r.midIdx = s.midIdx;
    r.w = s.w;
    r.wp = s.wp;
    // middle slot with its free index moved to `to`
    auto tau = [&](const Index& to) {
        Ast m = s.mid;
        relabel(m, s.midIdx, to);
        return m;
    };
    const Coeff i = Coeff::i();

    if (d.fam == Fam::Reeb) {
        int g1 = ctx.lg.fresh(), g2 = ctx.lg.fresh();
        r.top = astSum({astD({d}, s.top), astScale(iOverN2(), astProd({atomP(), s.top})),
                        astScale(-i, s.bot)});
        r.mid = astSum(
            {astD({d}, s.mid),
             astScale(-i, astProd({astSym("Pab", {s.midIdx, upH(g1)}), tau(loH(g1))})),
             astScale(iOverN2(), astProd({atomP(), s.mid})),
             astScale(i * Coeff(2), astProd({s.top, call("T", {s.midIdx})}))});
        r.bot = astSum({astD({d}, s.bot), astScale(iOverN2(), astProd({atomP(), s.bot})),
                        astScale(i * Coeff(2), astProd({call("T", {upH(g2)}), tau(loH(g2))})),
                        astScale(i, astProd({call("S", {}), s.top}))});
        return r;
    }
    if (isHoloType(d)) {
        int g = ctx.lg.fresh();
        r.top = astSum({astD({d}, s.top), astScale(Coeff(-1), tau(d))});
        r.mid = astSum({astD({d}, s.mid),
                        astScale(i, astProd({s.top, astSym("A", {s.midIdx, d})}))});
        r.bot = astSum(
            {astD({d}, s.bot),
             astScale(Coeff(-1), astProd({astSym("Pab", {d, upH(g)}), tau(loH(g))})),
             astProd({s.top, call("T", {d})})});
        return r;
    }
    // antiholomorphic direction
    int g = ctx.lg.fresh();
    r.top = astD({d}, s.top);
    r.mid = astSum({astD({d}, s.mid), astProd({s.top, astSym("Pab", {s.midIdx, d})}),
                    astProd({s.bot, astSym("h", {s.midIdx, d})})});
    r.bot = astSum(
        {astD({d}, s.bot),
         astScale(i, astProd({astSym("A", {upH(g), d}, true), tau(loH(g))})),
         astScale(Coeff(-1), astProd({s.top, call("T", {d})}))});
    return r;
}

TractorSection tractorD(const Ast& f, const Coeff& w, const Coeff& wp, ParseCtx& ctx) {
    TractorSection s;
    s.w = w;
    s.wp = wp;
    Coeff q = Coeff::n() + w + wp;
    s.midIdx = loH(ctx.lg.fresh());
    s.top = astScale(w * q, f);
    s.mid = astScale(q, astD({s.midIdx}, f));
    int g = ctx.lg.fresh();
    Coeff cP = w * (Coeff(1) + (wp - w) / (Coeff::n() + Coeff(2)));
    s.bot = astScale(
        Coeff(-1),
        astSum({astD({upH(g), loH(g)}, f), astScale(Coeff::i() * w, astD({reebIdx()}, f)),
                astScale(cP, astProd({atomP(), f}))}));
    return s;
}

TractorSection tractorLaplacian(const TractorSection& s, ParseCtx& ctx) {
    // nabla^b nabla_b = h^{b c-bar} nabla_{c-bar} nabla_b
    int b = ctx.lg.fresh(), c = ctx.lg.fresh();
    TractorSection inner = tractorDeriv(s, loH(b), ctx);
    TractorSection r = tractorDeriv(inner, idx(Fam::Anti, false, c), ctx);
    Ast hf = astSym("h", {upH(b), idx(Fam::Anti, true, c)});
    r.top = astProd({hf, r.top});
    r.mid = astProd({hf, r.mid});
    r.bot = astProd({hf, r.bot});
    return r;
}

Expr extractPaneitz(const std::string& scalar, ParseCtx& ctx) {
    Coeff w = (Coeff(1) - Coeff::n()) / Coeff(2);
    Ast f = expandCalls(parseAst(scalar, ctx), ctx);
    TractorSection df = tractorD(f, w, w, ctx);
    TractorSection lap = tractorLaplacian(df, ctx);
    TractorSection reeb = tractorDeriv(df, reebIdx(), ctx);
    Coeff cw = w - Coeff(1);
    Coeff cP = cw * (Coeff(1) + Coeff(1) / (Coeff::n() + Coeff(2)));
    auto comb = [&](const Ast& x, const Ast& y, const Ast& d0) {
        return astScale(Coeff(-1),
                        astSum({x, astScale(Coeff::i() * cw, y),
                                astScale(cP, astProd({atomP(), d0}))}));
    };
    Ast top = comb(lap.top, reeb.top, df.top);
    Ast mid = comb(lap.mid, reeb.mid, df.mid);
    Ast bot = comb(lap.bot, reeb.bot, df.bot);
    for (const Ast* slot : {&top, &mid}) {
        Expr t = flatten(expandCalls(*slot, ctx));
        if (!closure(t, 0, {}, ctx.lg).terms.empty())
            throw SideConditionFailed("upper tractor slot does not vanish");
    }
    Expr r = flatten(expandCalls(bot, ctx));
    return scale(r, Coeff(4));
}

AssemblyReport feffermanAssembly(ParseCtx& ctx, bool correctedGradientTerm) {
    // quarter pushforwards of the squared Laplacian, the curvature part, and
    // the fourth order curvature scalar on the circle bundle; N = 2n+2, so
    // the zeroth order part carries the factor (N-4)/2 = n-1
    //
    // The tabulated curvature pushforward carries a first order gradient
    // term with coefficient -32(n^2-1)/(n(n+2)); rewriting the divergence
    // form of the trace-free Schouten term through the Bianchi identity
    // shows the consistent value is +8(n^2-1)/(n(n+2)), off by a factor of
    // -4.  The default report keeps the tabulated value and emits the
    // residual verbatim; the corrected variant documents that the residual
    // is attributable to that single coefficient.
    std::string lap2 = "Db(Db(u))";
    std::string grad = correctedGradientTerm ? " + (8" : " - (32";
    std::string curv =
        "D[0,0](u)"
        " - 4*Im(D[^z1](A[z1,z2]*D[^z2](u)))"
        " + 4*(Pab[^z4',^z3] - P*h[^z3,^z4']/n)*D[z4',z3](u)"
        " - (4*(n^2-1)/n)*Re(D[^z5](P*D[z5](u)))" +
        grad +
        "*(n^2-1)/(n*(n+2)))*Re((D[z6](P)"
        " - (i*n/(2*(n+1)))*D[^z7](A[z6,z7]))*D[^z6](u))";
    std::string q =
        "((n+1)^2/(n*(n+2)))*Db(P)"
        " - (2/(n*(n+2)))*Im(D[^z1,^z2](A[z1,z2]))"
        " - ((n+1)/n)*(Pab[z3,z4']*Pab~[^z3,^z4'] - P*P/n)"
        " - ((n-1)/n)*A[z5,z6]*A~[^z5,^z6]"
        " + ((n-1)*(n+1)^2/n^2)*P*P";
    Expr lhs = parseExpr(lap2 + " + " + curv + " + (n-1)*(" + q + ")*u", ctx);
    Expr rhs = parseExpr("P4(u)", ctx);
    AssemblyReport rep;
    rep.residual = closure(lhs - rhs, 0, {}, ctx.lg);
    rep.ok = rep.residual.terms.empty();
    return rep;
}

}  // namespace cr
