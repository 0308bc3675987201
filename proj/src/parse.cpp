#include "cr/parse.hpp"

#include <cctype>
#include <sstream>

namespace cr {

int ParseCtx::label(const std::string& name) {
    auto it = labelByName.find(name);
    if (it != labelByName.end()) return it->second;
    int id = (int)labelNames.size();
    if (id >= kDummyBase) throw ParseError("too many labels");
    labelByName[name] = id;
    labelNames.push_back(name);
    return id;
}

std::string ParseCtx::nameOf(int lab) const {
    if (lab >= 0 && lab < (int)labelNames.size()) return labelNames[lab];
    if (lab >= kDummyBase && lab < kFreshBase)
        return "d" + std::to_string(lab - kDummyBase);
    return "x" + std::to_string(lab);
}

Ast astNum(Coeff c) {
    Ast a;
    a.kind = Ast::Num;
    a.num = std::move(c);
    return a;
}

Ast astSym(const std::string& name, std::vector<Index> slots, bool cj) {
    int id = Registry::get().id(name);
    if (id < 0) throw ParseError("unknown symbol: " + name);
    Ast a;
    a.kind = Ast::Atom;
    a.atom.sym = id;
    a.atom.cj = cj;
    a.atom.slots = std::move(slots);
    if (a.atom.slots.size() != Registry::get().decl(id).sig.size())
        throw ParseError("arity mismatch for " + name);
    return a;
}

Ast astSum(std::vector<Ast> ch) {
    Ast a;
    a.kind = Ast::Sum;
    a.ch = std::move(ch);
    return a;
}

Ast astProd(std::vector<Ast> ch) {
    Ast a;
    a.kind = Ast::Prod;
    a.ch = std::move(ch);
    return a;
}

Ast astD(std::vector<Index> dv, Ast child) {
    Ast a;
    a.kind = Ast::Deriv;
    a.dv = std::move(dv);
    a.ch.push_back(std::move(child));
    return a;
}

Ast astScale(Coeff c, Ast x) { return astProd({astNum(std::move(c)), std::move(x)}); }

Ast astConj(const Ast& a) {
    Ast r = a;
    switch (a.kind) {
        case Ast::Num:
            r.num = a.num.conj();
            break;
        case Ast::Atom:
            r.atom.cj = !a.atom.cj;
            for (auto& s : r.atom.slots) s = Index{oppFam(s.fam), s.up, s.lab};
            break;
        case Ast::Deriv:
            for (auto& d : r.dv)
                if (d.fam != Fam::Reeb) d = Index{oppFam(d.fam), d.up, d.lab};
            r.ch[0] = astConj(a.ch[0]);
            break;
        case Ast::Sum:
        case Ast::Prod:
            for (size_t i = 0; i < a.ch.size(); i++) r.ch[i] = astConj(a.ch[i]);
            break;
        case Ast::Call:
            throw ParseError("conj of unexpanded call " + a.call);
    }
    return r;
}

Expr flatten(const Ast& a) {
    switch (a.kind) {
        case Ast::Num:
            return exprConst(a.num);
        case Ast::Atom: {
            Term t;
            t.c = Coeff(1);
            t.fs.push_back(a.atom);
            return exprTerm(t);
        }
        case Ast::Sum: {
            Expr e;
            for (const auto& c : a.ch) e = e + flatten(c);
            return e;
        }
        case Ast::Prod: {
            Expr e = exprOne();
            for (const auto& c : a.ch) e = mulShared(e, flatten(c));
            return e;
        }
        case Ast::Deriv:
            return applyPrefix(a.dv, flatten(a.ch[0]));
        case Ast::Call:
            throw ParseError("flatten of unexpanded call " + a.call);
    }
    throw ParseError("bad ast");
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Lexer {
    const std::string& s;
    size_t p = 0;
    explicit Lexer(const std::string& src) : s(src) {}

    void ws() {
        while (p < s.size() && isspace((unsigned char)s[p])) p++;
    }
    char peek() {
        ws();
        return p < s.size() ? s[p] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            p++;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c))
            throw ParseError(std::string("expected '") + c + "' near ..." +
                             s.substr(p, 12));
    }
    bool identStart() {
        char c = peek();
        return isalpha((unsigned char)c) || c == '_';
    }
    std::string ident() {
        ws();
        size_t q = p;
        while (p < s.size() && (isalnum((unsigned char)s[p]) || s[p] == '_')) p++;
        if (q == p) throw ParseError("expected identifier near ..." + s.substr(p, 12));
        return s.substr(q, p - q);
    }
    long number() {
        ws();
        size_t q = p;
        while (p < s.size() && isdigit((unsigned char)s[p])) p++;
        if (q == p) throw ParseError("expected number");
        return std::stol(s.substr(q, p - q));
    }
};

struct Parser {
    Lexer lx;
    ParseCtx& ctx;
    Parser(const std::string& src, ParseCtx& c) : lx(src), ctx(c) {}

    Index parseIdx() {
        bool up = lx.eat('^');
        if (isdigit((unsigned char)lx.peek())) {
            long v = lx.number();
            if (v != 0 || up) throw ParseError("bad index");
            return reebIdx();
        }
        std::string name = lx.ident();
        bool anti = lx.eat('\'');
        return idx(anti ? Fam::Anti : Fam::Holo, up, ctx.label(name));
    }

    std::vector<Index> idxList() {
        std::vector<Index> v;
        lx.expect('[');
        if (!lx.eat(']')) {
            do v.push_back(parseIdx());
            while (lx.eat(','));
            lx.expect(']');
        }
        return v;
    }

    // constant-only evaluation for '/' and '^'
    Coeff constOf(const Ast& a) {
        Expr e = flatten(a);
        Coeff c(0);
        for (const auto& t : e.terms) {
            if (!t.fs.empty()) throw ParseError("expected a pure coefficient");
            c = c + t.c;
        }
        return c;
    }

    Ast primary() {
        char c = lx.peek();
        if (c == '(') {
            lx.eat('(');
            Ast e = expr();
            lx.expect(')');
            return e;
        }
        if (isdigit((unsigned char)c)) return astNum(Coeff(RatFn(Rat(lx.number()))));
        std::string name = lx.ident();
        if (name == "n") return astNum(Coeff::n());
        if (name == "i") return astNum(Coeff::i());
        bool cj = lx.eat('~');
        std::vector<Index> ids;
        if (lx.peek() == '[') ids = idxList();
        if (lx.peek() == '(' && !cj) {
            lx.eat('(');
            std::vector<Ast> args;
            if (!lx.eat(')')) {
                do args.push_back(expr());
                while (lx.eat(','));
                lx.expect(')');
            }
            if (name == "D") {
                if (args.size() != 1 || ids.empty())
                    throw ParseError("D needs indices and one argument");
                return astD(ids, std::move(args[0]));
            }
            Ast a;
            a.kind = Ast::Call;
            a.call = name;
            a.dv = std::move(ids);
            a.ch = std::move(args);
            return a;
        }
        if (name == "R") {
            if (cj || !ids.empty()) throw ParseError("R takes no indices");
            // Webster scalar curvature, alias for 2(n+1)P
            return astScale(Coeff(RatFn(Poly(std::vector<Rat>{2, 2}))),
                            astSym("P", {}));
        }
        if (!cj && Registry::get().id(name) < 0) {
            // unknown bare name: an operator macro without arguments
            Ast a;
            a.kind = Ast::Call;
            a.call = name;
            a.dv = std::move(ids);
            return a;
        }
        return astSym(name, std::move(ids), cj);
    }

    Ast factor() {
        if (lx.eat('-')) return astScale(Coeff(-1), factor());
        Ast a = primary();
        if (lx.eat('^')) {
            long k = lx.number();
            Coeff base = constOf(a);
            Coeff r(1);
            for (long j = 0; j < k; j++) r = r * base;
            return astNum(r);
        }
        return a;
    }

    Ast term() {
        Ast a = factor();
        std::vector<Ast> prod{std::move(a)};
        while (true) {
            if (lx.eat('*')) {
                prod.push_back(factor());
            } else if (lx.eat('/')) {
                Coeff d = constOf(factor());
                prod.push_back(astNum(d.inverse()));
            } else
                break;
        }
        if (prod.size() == 1) return std::move(prod[0]);
        return astProd(std::move(prod));
    }

    Ast expr() {
        std::vector<Ast> sum;
        sum.push_back(term());
        while (true) {
            if (lx.eat('+'))
                sum.push_back(term());
            else if (lx.eat('-'))
                sum.push_back(astScale(Coeff(-1), term()));
            else
                break;
        }
        if (sum.size() == 1) return std::move(sum[0]);
        return astSum(std::move(sum));
    }
};

}  // namespace

Ast parseAst(const std::string& src, ParseCtx& ctx) {
    Parser p(src, ctx);
    Ast a = p.expr();
    p.lx.ws();
    if (p.lx.p != src.size())
        throw ParseError("trailing input: ..." + src.substr(p.lx.p, 16));
    return a;
}

Expr parseExpr(const std::string& src, ParseCtx& ctx) {
    Ast a = parseAst(src, ctx);
    a = expandCalls(a, ctx);
    return flatten(a);
}

// ---------------------------------------------------------------------------
// printing

namespace {

std::string idxStr(const Index& i, const ParseCtx& ctx) {
    if (i.fam == Fam::Reeb) return "0";
    std::string s = i.up ? "^" : "";
    s += ctx.nameOf(i.lab);
    if (i.fam == Fam::Anti) s += "'";
    return s;
}

std::string factorStr(const Factor& f, const ParseCtx& ctx) {
    const auto& d = Registry::get().decl(f.sym);
    std::string base = d.name;
    if (f.cj) base += "~";
    if (!f.slots.empty()) {
        base += "[";
        for (size_t k = 0; k < f.slots.size(); k++) {
            if (k) base += ",";
            base += idxStr(f.slots[k], ctx);
        }
        base += "]";
    }
    if (f.deriv.empty()) return base;
    std::string s = "D[";
    for (size_t k = 0; k < f.deriv.size(); k++) {
        if (k) s += ",";
        s += idxStr(f.deriv[k], ctx);
    }
    return s + "](" + base + ")";
}

}  // namespace

std::string printTerm(const Term& t, const ParseCtx& ctx) {
    std::ostringstream os;
    os << "(" << t.c.str() << ")";
    for (const auto& f : t.fs) os << "*" << factorStr(f, ctx);
    return os.str();
}

std::string printExpr(const Expr& e, const ParseCtx& ctx) {
    if (e.terms.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < e.terms.size(); i++) {
        if (i) s += " + ";
        s += printTerm(e.terms[i], ctx);
    }
    return s;
}

}  // namespace cr
