#include "cr/conformal.hpp"

#include <set>
#include <vector>

namespace cr {

namespace {

Index loweredPartner(const Index& i, int lab) {
    return idx(oppFam(i.fam), false, lab);
}

// replace every occurrence of the exact index `from` (a free index, so it
// occurs once) with `to`
void relabelAst(Ast& a, const Index& from, const Index& to) {
    auto one = [&](Index& i) {
        if (i == from) i = to;
    };
    if (a.kind == Ast::Atom)
        for (auto& s : a.atom.slots) one(s);
    for (auto& d : a.dv) one(d);
    for (auto& c : a.ch) relabelAst(c, from, to);
}

Ast hAst(Index a, Index b) {
    Ast h;
    h.kind = Ast::Atom;
    h.atom.sym = SYM_H;
    h.atom.slots = {a, b};
    return h;
}

struct SubtreeInfo {
    bool zero = false;
    std::vector<Index> frees;
    RatFn weight{0};
};

SubtreeInfo analyze(const Ast& x) {
    SubtreeInfo info;
    Expr e = flatten(x);
    if (e.terms.empty()) {
        info.zero = true;
        return info;
    }
    auto fr = freeIndices(e.terms[0]);
    std::set<std::string> ref;
    for (const auto& [lab, i] : fr) {
        info.frees.push_back(i);
        ref.insert(std::to_string((int)i.fam) + "," + std::to_string(i.up) + "," +
                   std::to_string(i.lab));
    }
    info.weight = termWeight(e.terms[0]);
    for (const auto& t : e.terms) {
        auto f2 = freeIndices(t);
        std::set<std::string> got;
        for (const auto& [lab, i] : f2)
            got.insert(std::to_string((int)i.fam) + "," + std::to_string(i.up) + "," +
                       std::to_string(i.lab));
        if (got != ref) throw ExprError("conformal transform: inhomogeneous free indices");
        if (!(termWeight(t) == info.weight))
            throw ExprError("conformal transform: inhomogeneous weight");
    }
    return info;
}

struct Hatter {
    ParseCtx& ctx;
    Ast sigma;

    Ast ds(std::vector<Index> dv) { return astD(std::move(dv), sigma); }

    Ast hat(const Ast& a) {
        switch (a.kind) {
            case Ast::Num:
                return a;
            case Ast::Sum: {
                Ast r = a;
                for (auto& c : r.ch) c = hat(c);
                return r;
            }
            case Ast::Prod: {
                Ast r = a;
                for (auto& c : r.ch) c = hat(c);
                return r;
            }
            case Ast::Deriv: {
                Ast cur = hat(a.ch[0]);
                for (auto it = a.dv.rbegin(); it != a.dv.rend(); ++it)
                    cur = hatDeriv(*it, cur);
                return cur;
            }
            case Ast::Atom:
                return hatAtom(a);
            case Ast::Call:
                throw ExprError("conformal transform of unexpanded call");
        }
        throw ExprError("bad ast");
    }

    Ast hatAtom(const Ast& a) {
        const Factor& f = a.atom;
        const auto& d = Registry::get().decl(f.sym);
        if (f.cj) {
            Ast base = a;
            base.atom.cj = false;
            for (auto& s : base.atom.slots) s = idx(oppFam(s.fam), s.up, s.lab);
            return astConj(hatAtom(base));
        }
        // pre-lower raised slots with explicit (invariant) Levi factors
        for (size_t k = 0; k < f.slots.size(); k++) {
            if (!f.slots[k].up) continue;
            int g = ctx.lg.fresh();
            Ast inner = a;
            inner.atom.slots[k] = loweredPartner(f.slots[k], g);
            return astProd({hAst(idx(oppFam(f.slots[k].fam), true, g), f.slots[k]),
                            hatAtom(inner)});
        }
        if (f.sym == SYM_H) return a;
        if (f.sym == SYM_RM)
            throw ExprError("conformal transform of the full curvature is not supported");
        if (f.sym == SYM_A) {
            // A + i D2 sigma - i Dsigma Dsigma
            Index al = f.slots[0], be = f.slots[1];
            return astSum({a, astScale(Coeff::i(), ds({be, al})),
                           astScale(-Coeff::i(), astProd({ds({al}), ds({be})}))});
        }
        if (f.sym == SYM_PAB) {
            Index al = f.slots[0], be = f.slots[1];
            int g = ctx.lg.fresh();
            Coeff half(RatFn(Rat(1, 2)));
            return astSum(
                {a, astScale(-half, ds({be, al})), astScale(-half, ds({al, be})),
                 astScale(-half,
                          astProd({ds({idx(Fam::Holo, true, g)}),
                                   ds({idx(Fam::Holo, false, g)}), hAst(al, be)}))});
        }
        if (f.sym == SYM_P) {
            int g1 = ctx.lg.fresh(), g2 = ctx.lg.fresh(), g3 = ctx.lg.fresh();
            Coeff half(RatFn(Rat(1, 2)));
            // P + (1/2) Delta_b sigma - (n/2) |d sigma|^2
            Ast lap = astSum({astScale(Coeff(-1), ds({idx(Fam::Holo, true, g1),
                                                      idx(Fam::Holo, false, g1)})),
                              astScale(Coeff(-1), ds({idx(Fam::Holo, false, g2),
                                                      idx(Fam::Holo, true, g2)}))});
            return astSum(
                {a, astScale(half, lap),
                 astScale(Coeff::n() * (-half),
                          astProd({ds({idx(Fam::Holo, true, g3)}),
                                   ds({idx(Fam::Holo, false, g3)})}))});
        }
        if (d.sig.empty()) return a;  // scalar functions are invariant
        throw ExprError("conformal transform: unsupported atom " + d.name);
    }

    Ast hatDeriv(const Index& d0, const Ast& x) {
        SubtreeInfo info = analyze(x);
        if (info.zero) return astNum(Coeff(0));

        if (d0.fam == Fam::Reeb) {
            if (!info.frees.empty())
                throw ExprError("conformal Reeb derivative of a tensor is not supported");
            int g1 = ctx.lg.fresh(), g2 = ctx.lg.fresh();
            std::vector<Ast> sum;
            sum.push_back(astD({d0}, x));
            sum.push_back(astScale(Coeff::i(),
                                   astProd({ds({idx(Fam::Holo, false, g1)}),
                                            astD({idx(Fam::Holo, true, g1)}, x)})));
            sum.push_back(astScale(-Coeff::i(),
                                   astProd({ds({idx(Fam::Holo, true, g2)}),
                                            astD({idx(Fam::Holo, false, g2)}, x)})));
            if (!info.weight.isZero())
                sum.push_back(astScale(Coeff(info.weight), astProd({x, ds({d0})})));
            return astSum(std::move(sum));
        }

        // raised derivative: lower through an explicit Levi factor
        if (d0.up) {
            int g = ctx.lg.fresh();
            Index dl = loweredPartner(d0, g);
            return astProd({hAst(idx(oppFam(d0.fam), true, g), d0), hatDeriv(dl, x)});
        }

        // raised free index: same trick, the Levi factor passes through
        for (const auto& v : info.frees) {
            if (!v.up) continue;
            int g = ctx.lg.fresh();
            Index vl = loweredPartner(v, g);
            Ast inner = x;
            relabelAst(inner, v, vl);
            return astProd({hAst(idx(oppFam(v.fam), true, g), v), hatDeriv(d0, inner)});
        }

        std::vector<Ast> sum;
        sum.push_back(astD({d0}, x));
        RatFn c0 = info.weight;
        std::vector<Index> same, cross;
        for (const auto& v : info.frees)
            (dirClass(v) == dirClass(d0) ? same : cross).push_back(v);
        c0 = c0 - RatFn(Rat((long)same.size()));
        if (!c0.isZero())
            sum.push_back(astScale(Coeff(c0), astProd({x, ds({d0})})));
        for (const auto& v : same) {
            Ast rel = x;
            relabelAst(rel, v, d0);
            sum.push_back(astScale(Coeff(-1), astProd({std::move(rel), ds({v})})));
        }
        for (const auto& v : cross) {
            int g = ctx.lg.fresh();
            Ast rel = x;
            relabelAst(rel, v, idx(v.fam, false, g));
            sum.push_back(astProd({std::move(rel), ds({idx(v.fam, true, g)}),
                                   hAst(v, d0)}));
        }
        return astSum(std::move(sum));
    }
};

}  // namespace

Ast conformalHat(const Ast& a, ParseCtx& ctx, const Ast& sigma) {
    Hatter h{ctx, sigma};
    return h.hat(a);
}

Expr conformalTransform(const std::string& src, ParseCtx& ctx,
                        const std::string& sigma) {
    Ast a = parseAst(src, ctx);
    a = expandCalls(a, ctx);
    Ast s = parseAst(sigma, ctx);
    s = expandCalls(s, ctx);
    return flatten(conformalHat(a, ctx, s));
}

}  // namespace cr
