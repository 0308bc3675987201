#pragma once

// Expression trees and the surface syntax.
//
// Grammar (informal):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-'? primary ('^' INT)?
//   primary := NUMBER | 'n' | 'i' | '(' expr ')'
//            | NAME ('[' idx (',' idx)* ']')? ('(' expr (',' expr)* ')')?
//   idx     := '^'? (LABEL | '0')        LABEL ending in ' is antiholomorphic
//
// Derivatives: D[a,^b,0](f) applies nabla_a nabla^b nabla_0, outermost first.
// NAMEs with an argument list that are not D/Re/Im/conj are operator macros
// expanded by the calculus module; bare NAMEs are registry symbols.

#include "cr/expr.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cr {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

struct ParseCtx {
    std::map<std::string, int> labelByName;
    std::vector<std::string> labelNames;
    LabelGen lg;
    int label(const std::string& name);  // intern a user label
    std::string nameOf(int lab) const;
};

struct Ast {
    enum Kind { Num, Atom, Sum, Prod, Deriv, Call } kind = Num;
    Coeff num;                  // Num
    Factor atom;                // Atom (deriv empty)
    std::vector<Ast> ch;        // Sum/Prod children, Deriv child, Call args
    std::vector<Index> dv;      // Deriv prefix (outermost first); Call indices
    std::string call;           // Call name
};

Ast astNum(Coeff c);
Ast astSym(const std::string& name, std::vector<Index> slots, bool cj = false);
Ast astSum(std::vector<Ast> ch);
Ast astProd(std::vector<Ast> ch);
Ast astD(std::vector<Index> dv, Ast child);
Ast astScale(Coeff c, Ast a);
Ast astConj(const Ast& a);

// parse; Call nodes are left unexpanded
Ast parseAst(const std::string& src, ParseCtx& ctx);

// flatten to tensor terms; throws if Call nodes remain
Expr flatten(const Ast& a);

// parse + macro-expand + flatten (macro expansion lives in calculus.cpp)
Ast expandCalls(const Ast& a, ParseCtx& ctx);
Expr parseExpr(const std::string& src, ParseCtx& ctx);

// canonical-ish printable form, reparseable with the same ParseCtx labels
std::string printExpr(const Expr& e, const ParseCtx& ctx);
std::string printTerm(const Term& t, const ParseCtx& ctx);

}  // namespace cr
