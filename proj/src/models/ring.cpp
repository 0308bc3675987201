#include "cr/models/models.hpp"

#include <sstream>

namespace cr {

namespace {

// add v * mo into r, reducing sphere monomials through z2 z2b -> 1 - z1 z1b
void addMono(RingEl& r, Mono mo, const K& v) {
    if (v.isZero()) return;
    if (r.model == Model::Sphere && mo.e[2] > 0 && mo.e[3] > 0) {
        mo.e[2]--;
        mo.e[3]--;
        addMono(r, mo, v);
        mo.e[0]++;
        mo.e[1]++;
        addMono(r, mo, -v);
        return;
    }
    auto it = r.c.find(mo);
    if (it == r.c.end()) {
        r.c.emplace(mo, v);
    } else {
        it->second = it->second + v;
        if (it->second.isZero()) r.c.erase(it);
    }
}

int varCount(Model m) { return m == Model::Sphere ? 4 : 3; }

}  // namespace

RingEl ringZero(Model m) { return RingEl{m, {}}; }

RingEl ringConst(Model m, K v) {
    RingEl r{m, {}};
    addMono(r, Mono{}, v);
    return r;
}

RingEl ringMono(Model m, Mono mo, K v) {
    RingEl r{m, {}};
    addMono(r, mo, v);
    return r;
}

RingEl ringVar(Model m, int which) {
    if (which < 0 || which >= varCount(m)) throw ModelError("no such coordinate");
    Mono mo;
    mo.e[which] = 1;
    return ringMono(m, mo, K(1));
}

RingEl ringMarker(Model m, int k) {
    Mono mo;
    mo.k = k;
    return ringMono(m, mo, K(1));
}

RingEl operator+(const RingEl& a, const RingEl& b) {
    if (a.model != b.model) throw ModelError("mixed models");
    RingEl r = a;
    for (const auto& [mo, v] : b.c) addMono(r, mo, v);
    return r;
}

RingEl operator-(const RingEl& a, const RingEl& b) {
    if (a.model != b.model) throw ModelError("mixed models");
    RingEl r = a;
    for (const auto& [mo, v] : b.c) addMono(r, mo, -v);
    return r;
}

RingEl operator*(const RingEl& a, const RingEl& b) {
    if (a.model != b.model) throw ModelError("mixed models");
    RingEl r{a.model, {}};
    for (const auto& [ma, va] : a.c)
        for (const auto& [mb, vb] : b.c) {
            Mono mo;
            mo.k = ma.k + mb.k;
            for (int j = 0; j < 4; j++) mo.e[j] = ma.e[j] + mb.e[j];
            addMono(r, mo, va * vb);
        }
    return r;
}

RingEl scale(const RingEl& a, const K& v) {
    RingEl r{a.model, {}};
    for (const auto& [mo, x] : a.c) addMono(r, mo, x * v);
    return r;
}

RingEl conj(const RingEl& a) {
    // markers are real (sigma real); coordinates swap with their conjugates,
    // heisenberg t is real
    RingEl r{a.model, {}};
    for (const auto& [mo, v] : a.c) {
        Mono mc = mo;
        std::swap(mc.e[0], mc.e[1]);
        if (a.model == Model::Sphere) std::swap(mc.e[2], mc.e[3]);
        addMono(r, mc, v.conj());
    }
    return r;
}

bool isReal(const RingEl& a) { return (a - conj(a)).isZero(); }

std::string RingEl::str() const {
    if (c.empty()) return "0";
    static const char* sphereVars[] = {"z1", "z1b", "z2", "z2b"};
    static const char* heisVars[] = {"z", "zb", "t", "?"};
    const char** vars = model == Model::Sphere ? sphereVars : heisVars;
    std::ostringstream os;
    bool first = true;
    for (const auto& [mo, v] : c) {
        if (!first) os << " + ";
        first = false;
        // bare rationals print without the field wrapper
        if (v.b == 0 && v.c == 0 && v.d == 0)
            os << v.a.str();
        else
            os << "(" << v.str() << ")";
        if (mo.k != 0) os << "*E" << mo.k;  // e^{k sigma/2}
        for (int j = 0; j < 4; j++)
            if (mo.e[j] > 0) {
                os << "*" << vars[j];
                if (mo.e[j] > 1) os << "^" << mo.e[j];
            }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// derivations

namespace {

// v * d mono / d var
RingEl partial(Model m, const Mono& mo, const K& v, int var) {
    if (mo.e[var] == 0) return ringZero(m);
    Mono md = mo;
    md.e[var]--;
    return ringMono(m, md, v * K(Rat(mo.e[var])));
}

// base vector field applied to one monomial (marker ignored)
RingEl baseDeriv(Model m, int which, const Mono& mo, const K& v) {
    if (m == Model::Sphere) {
        if (which == 0) {
            // T0 = (i/2)(z1 d1 + z2 d2 - z1b d1b - z2b d2b)
            long w = mo.e[0] + mo.e[2] - mo.e[1] - mo.e[3];
            return ringMono(m, mo, v * K(Rat(0), Rat(w, 2), Rat(0), Rat(0)));
        }
        K half = K(Rat(0), Rat(0), Rat(1, 2), Rat(0));  // 1/sqrt2
        if (which == 1) {
            // Z0 = (1/sqrt2)(z2b d/dz1 - z1b d/dz2)
            Mono a = mo;
            a.e[3]++;
            Mono b = mo;
            b.e[1]++;
            RingEl r = ringZero(m);
            if (mo.e[0] > 0) r = r + scale(partial(m, a, v, 0), half);
            if (mo.e[2] > 0) r = r - scale(partial(m, b, v, 2), half);
            return r;
        }
        // Z0b = (1/sqrt2)(z2 d/dz1b - z1 d/dz2b)
        Mono a = mo;
        a.e[2]++;
        Mono b = mo;
        b.e[0]++;
        RingEl r = ringZero(m);
        if (mo.e[1] > 0) r = r + scale(partial(m, a, v, 1), half);
        if (mo.e[3] > 0) r = r - scale(partial(m, b, v, 3), half);
        return r;
    }
    // heisenberg: z, zb, t
    if (which == 0) return partial(m, mo, v, 2);  // T0 = d/dt
    if (which == 1) {
        // Z0 = d/dz + (i/2) zb d/dt
        Mono a = mo;
        a.e[1]++;
        return partial(m, mo, v, 0) + scale(partial(m, a, v, 2), K::i() * K(Rat(1, 2)));
    }
    // Z0b = d/dzb - (i/2) z d/dt
    Mono a = mo;
    a.e[0]++;
    return partial(m, mo, v, 1) - scale(partial(m, a, v, 2), K::i() * K(Rat(1, 2)));
}

}  // namespace

RingEl Derivation::operator()(const RingEl& f) const {
    RingEl r = ringZero(f.model);
    RingEl dsig = ringZero(f.model);
    bool needSig = false;
    for (const auto& [mo, v] : f.c)
        if (mo.k != 0) needSig = true;
    if (needSig) {
        if (sigma.model != f.model) throw ModelError("mixed models");
        for (const auto& [mo, v] : sigma.c) {
            if (mo.k != 0) throw ModelError("sigma must be marker free");
            dsig = dsig + baseDeriv(f.model, which, mo, v);
        }
    }
    for (const auto& [mo, v] : f.c) {
        RingEl d = baseDeriv(f.model, which, mo, v);
        // the monomial's marker survives differentiation of the polynomial part
        for (const auto& [md, vd] : d.c) {
            Mono mk = md;
            mk.k = mo.k;
            r = r + ringMono(f.model, mk, vd);
        }
        if (mo.k != 0)
            r = r + scale(ringMono(f.model, mo, v) * dsig, K(Rat(mo.k, 2)));
    }
    return r;
}

// ---------------------------------------------------------------------------
// surface syntax for ring elements

namespace {

struct RLexer {
    std::string s;
    size_t p = 0;
    void ws() { while (p < s.size() && isspace((unsigned char)s[p])) p++; }
    bool eat(char c) {
        ws();
        if (p < s.size() && s[p] == c) {
            p++;
            return true;
        }
        return false;
    }
    char peek() {
        ws();
        return p < s.size() ? s[p] : '\0';
    }
};

struct RParser {
    RLexer lx;
    Model m;

    RingEl expr() {
        RingEl r = lx.eat('-') ? scale(term(), K(-1)) : term();
        for (;;) {
            if (lx.eat('+'))
                r = r + term();
            else if (lx.eat('-'))
                r = r - term();
            else
                return r;
        }
    }

    RingEl term() {
        RingEl r = factor();
        for (;;) {
            if (lx.eat('*')) {
                r = r * factor();
            } else if (lx.eat('/')) {
                RingEl d = factor();
                if (d.c.size() != 1 || d.c.begin()->first != Mono{})
                    throw ModelError("can only divide by constants");
                r = scale(r, d.c.begin()->second.inverse());
            } else {
                return r;
            }
        }
    }

    RingEl factor() {
        RingEl r = primary();
        if (lx.eat('^')) {
            int e = number();
            RingEl p = ringConst(m, K(1));
            for (int j = 0; j < e; j++) p = p * r;
            r = p;
        }
        return r;
    }

    int number() {
        lx.ws();
        size_t q = lx.p;
        while (q < lx.s.size() && isdigit((unsigned char)lx.s[q])) q++;
        if (q == lx.p) throw ModelError("expected a number");
        int v = std::stoi(lx.s.substr(lx.p, q - lx.p));
        lx.p = q;
        return v;
    }

    RingEl primary() {
        if (lx.eat('-')) return scale(primary(), K(-1));
        if (lx.eat('(')) {
            RingEl r = expr();
            if (!lx.eat(')')) throw ModelError("expected )");
            return r;
        }
        if (isdigit((unsigned char)lx.peek())) return ringConst(m, K(Rat(number())));
        std::string name;
        lx.ws();
        while (lx.p < lx.s.size() && (isalnum((unsigned char)lx.s[lx.p])))
            name += lx.s[lx.p++];
        if (name.empty()) throw ModelError("parse error in ring element");
        if (lx.eat('(')) {
            RingEl a = expr();
            if (!lx.eat(')')) throw ModelError("expected )");
            if (name == "conj") return conj(a);
            K half(Rat(1, 2));
            if (name == "Re") return scale(a + conj(a), half);
            if (name == "Im") return scale(a - conj(a), K::i() * (-half));
            throw ModelError("unknown function: " + name);
        }
        if (name == "i") return ringConst(m, K::i());
        if (name == "sqrt2") return ringConst(m, K::sqrt2());
        auto var = [&](int j) { return ringVar(m, j); };
        if (m == Model::Sphere) {
            if (name == "z1") return var(0);
            if (name == "z1b") return var(1);
            if (name == "z2") return var(2);
            if (name == "z2b") return var(3);
        } else {
            if (name == "z") return var(0);
            if (name == "zb") return var(1);
            if (name == "t") return var(2);
        }
        throw ModelError("unknown name in ring element: " + name);
    }
};

}  // namespace

RingEl parseRing(const std::string& src, Model m) {
    RParser p;
    p.lx.s = src;
    p.m = m;
    RingEl r = p.expr();
    p.lx.ws();
    if (p.lx.p != src.size()) throw ModelError("trailing input in ring element");
    return r;
}

}  // namespace cr
