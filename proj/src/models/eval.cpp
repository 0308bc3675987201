#include "cr/models/models.hpp"

namespace cr {

namespace {

// +1 holomorphic direction, -1 antiholomorphic direction, 0 Reeb
int dirSign(const Index& d) {
    int c = dirClass(d);
    return c == 2 ? 1 : (c == 1 ? -1 : 0);
}

RingEl evalFactor(const Factor& f, const Structure& s,
                  const std::map<std::string, RingEl>& vals) {
    const auto& decl = Registry::get().decl(f.sym);
    RingEl v = ringZero(s.model);
    if (f.sym == SYM_H) {
        v = ringConst(s.model, K(1));
    } else if (f.sym == SYM_A) {
        v = s.A11;
    } else if (f.sym == SYM_PAB || f.sym == SYM_P) {
        // P = R/(2(n+1)) and the trace-free part vanishes when n = 1
        v = scale(s.R, K(Rat(1, 4)));
    } else if (f.sym == SYM_RM) {
        throw ModelError("curvature tensor: normalize at dimension 1 first");
    } else {
        auto it = vals.find(decl.name);
        if (it == vals.end()) throw ModelError("no value bound for " + decl.name);
        v = it->second;
    }
    if (f.cj) v = conj(v);

    // every index takes its single value; only the variance signature matters,
    // through the connection weight m = #holomorphic - #antiholomorphic
    int m = 0;
    for (const auto& sl : f.slots) m += dirSign(sl);
    for (auto it = f.deriv.rbegin(); it != f.deriv.rend(); ++it) {
        int c = dirClass(*it);
        RingEl dv = c == 0 ? s.dT(v) : (c == 1 ? s.dZb(v) : s.dZ(v));
        const RingEl& w = c == 0 ? s.w0 : (c == 1 ? s.wm : s.wp);
        if (m != 0) dv = dv - scale(w * v, K(Rat(m)));
        v = dv;
        m += dirSign(*it);
    }
    return v;
}

}  // namespace

RingEl evaluate(const Expr& e, const Structure& s,
                const std::map<std::string, RingEl>& vals) {
    Expr ne = normalize(e, 1);
    RingEl r = ringZero(s.model);
    for (const auto& t : ne.terms) {
        K c(t.c.re.eval(Rat(1)), t.c.im.eval(Rat(1)), Rat(0), Rat(0));
        RingEl v = ringConst(s.model, c);
        for (const auto& f : t.fs) v = v * evalFactor(f, s, vals);
        r = r + v;
    }
    return r;
}

RingEl applyOperator(const std::string& op, const RingEl& f, const Structure& s) {
    static const std::map<std::string, std::string> table = {
        {"Delta_b", "Db(f)"},
        {"Db", "Db(f)"},
        {"nabla_0", "D[0](f)"},
        {"D0", "D[0](f)"},
        {"P_alpha", "Palpha[a](f)"},
        {"Palpha", "Palpha[a](f)"},
        {"C", "Cop(f)"},
        {"Cop", "Cop(f)"},
        {"P4", "P4(f)"},
        {"P4prime", "P4prime(f)"},
        {"P4primecrit", "P4primecrit(f)"},
        {"Dop", "Dop(f)"},
        {"Q_hirachi", "Q()"},
        {"Q", "Q()"},
        {"Q4", "Q4()"},
        {"Q4prime", "Q4prime()"},
    };
    auto it = table.find(op);
    if (it == table.end()) throw ModelError("unknown operator: " + op);
    ParseCtx ctx;
    Expr e = parseExpr(it->second, ctx);
    return evaluate(e, s, {{"f", f}});
}

std::vector<RingEl> pluriharmonicBasis(Model m, int degree) {
    std::vector<RingEl> basis;
    basis.push_back(ringConst(m, K(1)));
    auto pushParts = [&](const RingEl& hol) {
        K half(Rat(1, 2));
        basis.push_back(scale(hol + conj(hol), half));
        basis.push_back(scale(hol - conj(hol), K::i() * (-half)));
    };
    if (m == Model::Sphere) {
        for (int d = 1; d <= degree; d++)
            for (int a = d; a >= 0; a--) {
                Mono mo;
                mo.e[0] = a;
                mo.e[2] = d - a;
                pushParts(ringMono(m, mo, K(1)));
            }
    } else {
        for (int d = 1; d <= degree; d++) {
            Mono mo;
            mo.e[0] = d;
            pushParts(ringMono(m, mo, K(1)));
        }
    }
    return basis;
}

}  // namespace cr
