#pragma once

// Abstract-index tensor terms for the pseudohermitian calculus.
//
// A Term is a coefficient in Q(n)(i) times a product of factors; a factor is
// a symbol instance (possibly conjugated) under a string of covariant
// derivatives, written outermost first.  Contractions are implicit: a label
// that occurs twice in a term (once lowered, once raised, same family) is a
// contracted pair, a label occurring once is free.  Raised indices are
// shorthand for contraction with the (parallel) Levi form, which is never
// stored except transiently or when both of its indices are free.

#include "cr/qn.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cr {

enum class Fam : uint8_t { Holo, Anti, Reeb };

inline Fam oppFam(Fam f) {
    if (f == Fam::Holo) return Fam::Anti;
    if (f == Fam::Anti) return Fam::Holo;
    return Fam::Reeb;
}

struct Index {
    Fam fam = Fam::Holo;
    bool up = false;
    int lab = -1;  // unused for Reeb
    bool operator==(const Index&) const = default;
};

inline Index idx(Fam f, bool up, int lab) { return Index{f, up, lab}; }
inline Index reebIdx() { return Index{Fam::Reeb, false, -1}; }

// 0 = Reeb, 1 = antiholomorphic direction, 2 = holomorphic direction.
// nabla^alpha differentiates antiholomorphically, nabla^{alphabar}
// holomorphically.
inline int dirClass(const Index& d) {
    if (d.fam == Fam::Reeb) return 0;
    bool holoDir = (d.fam == Fam::Holo) != d.up;
    return holoDir ? 2 : 1;
}

// (1,0)-type index: transforms like a lowered holomorphic slot.
inline bool isHoloType(const Index& d) {
    return d.fam != Fam::Reeb && ((d.fam == Fam::Holo) != d.up);
}

struct SymbolDecl {
    std::string name;
    std::vector<Fam> sig;  // declared slot families, base instance, lowered
    RatFn weight;          // bare density weight (diagonal)
    std::vector<std::vector<int>> sym;       // generating slot permutations
    std::optional<std::vector<int>> herm;    // conj folds to base via this perm
    bool parallel = false;                   // annihilated by the connection
};

class Registry {
public:
    static const Registry& get();
    int id(const std::string& name) const;  // -1 if unknown
    const SymbolDecl& decl(int i) const { return decls_[i]; }
    const std::vector<std::vector<int>>& group(int i) const { return groups_[i]; }
    int size() const { return (int)decls_.size(); }

private:
    Registry();
    std::vector<SymbolDecl> decls_;
    std::vector<std::vector<std::vector<int>>> groups_;
    std::map<std::string, int> byName_;
};

extern const int SYM_H, SYM_A, SYM_PAB, SYM_P, SYM_RM;
int scalarId(const std::string& name);  // throws on unknown

struct Factor {
    int sym = -1;
    bool cj = false;
    std::vector<Index> deriv;  // outermost first
    std::vector<Index> slots;
    bool operator==(const Factor&) const = default;
};

struct Term {
    Coeff c;
    std::vector<Factor> fs;
};

struct Expr {
    std::vector<Term> terms;
};

struct UnsupportedRank : std::runtime_error {
    explicit UnsupportedRank(const std::string& m) : std::runtime_error(m) {}
};
struct ExprError : std::runtime_error {
    explicit ExprError(const std::string& m) : std::runtime_error(m) {}
};

// Label allocation: user labels from the parser live below kFreshBase;
// normalization renumbers contracted labels into [kDummyBase, kFreshBase).
constexpr int kDummyBase = 1 << 20;
constexpr int kFreshBase = 1 << 24;

struct LabelGen {
    int next = kFreshBase;
    int fresh() { return next++; }
};

Expr exprOne();
Expr exprConst(Coeff c);
Expr exprTerm(Term t);

Expr operator+(const Expr&, const Expr&);
Expr operator-(const Expr&, const Expr&);
Expr scale(const Expr&, const Coeff&);
Expr conjugate(const Expr&);

// Product; contracted labels of b are renamed through lg to avoid capture.
Expr mul(const Expr& a, const Expr& b, LabelGen& lg);
// Product sharing the label namespace (caller guarantees no collisions).
Expr mulShared(const Expr& a, const Expr& b);

// Leibniz application of one covariant derivative / a whole prefix
// (outermost first) to every term.
Expr applyDeriv(const Index& d, const Expr& e);
Expr applyPrefix(const std::vector<Index>& pfx, const Expr& e);

// label -> occurrence count over deriv entries and slots of the whole term
std::map<int, int> labelCounts(const Term& t);
// free (once-occurring) labels with their index data
std::map<int, Index> freeIndices(const Term& t);

RatFn termWeight(const Term& t);
void validateTerm(const Term& t);

// number of free (within the factor) non-Reeb indices among
// deriv[from..] plus all slots
int tailRank(const Factor& f, int from);
// the unique tail-free index when tailRank == 1
Index tailFreeIndex(const Factor& f, int from);

// Full normalization: hermitian folding, Levi-form elimination, curvature
// trace rewrites (dim == 1 substitutes the curvature and Schouten tensors by
// their trace parts), canonical relabeling/ordering, like-term merge.
// dim == 0 means symbolic n.
Expr normalize(const Expr& e, int dim);

bool isZero(const Expr& e, int dim);

// string form of the canonical encoding, usable as a map key (coefficient
// excluded); expr must be output of normalize
std::string termKey(const Term& t);

}  // namespace cr
