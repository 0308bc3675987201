#include "cr/expr.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace cr {

const int SYM_H = 0;
const int SYM_A = 1;
const int SYM_PAB = 2;
const int SYM_P = 3;
const int SYM_RM = 4;

Registry::Registry() {
    auto add = [&](SymbolDecl d) {
        byName_[d.name] = (int)decls_.size();
        decls_.push_back(std::move(d));
    };
    // Levi form; handled specially (sortable slots, parallel).
    add({"h", {Fam::Holo, Fam::Anti}, RatFn(1), {}, std::vector<int>{1, 0}, true});
    // torsion A_{ab}, symmetric, not real
    add({"A", {Fam::Holo, Fam::Holo}, RatFn(0), {{1, 0}}, std::nullopt, false});
    // Schouten tensor P_{ab'}, hermitian
    add({"Pab", {Fam::Holo, Fam::Anti}, RatFn(0), {}, std::vector<int>{1, 0}, false});
    // Schouten trace; Webster scalar curvature R = 2(n+1) P
    add({"P", {}, RatFn(-1), {}, std::vector<int>{}, false});
    // Curvature R_{ab'cd'} with the pair symmetries a<->c, b'<->d'
    add({"Rm", {Fam::Holo, Fam::Anti, Fam::Holo, Fam::Anti}, RatFn(1),
         {{2, 1, 0, 3}, {0, 3, 2, 1}}, std::vector<int>{1, 0, 3, 2}, false});
    for (const char* s : {"f", "g", "u", "v", "sigma", "tau"})
        add({s, {}, RatFn(0), {}, std::vector<int>{}, false});
    // placeholder scalars used internally by operator macro expansion
    for (const char* s : {"arg1", "arg2"})
        add({s, {}, RatFn(0), {}, std::vector<int>{}, false});

    // close the symmetry generators into full groups
    for (auto& d : decls_) {
        int r = (int)d.sig.size();
        std::vector<int> id(r);
        for (int i = 0; i < r; i++) id[i] = i;
        std::set<std::vector<int>> grp{id};
        std::deque<std::vector<int>> work{id};
        while (!work.empty()) {
            auto p = work.front();
            work.pop_front();
            for (auto& g : d.sym) {
                std::vector<int> q(r);
                for (int i = 0; i < r; i++) q[i] = p[g[i]];
                if (grp.insert(q).second) work.push_back(q);
            }
        }
        groups_.emplace_back(grp.begin(), grp.end());
    }
}

const Registry& Registry::get() {
    static Registry r;
    return r;
}

int Registry::id(const std::string& name) const {
    auto it = byName_.find(name);
    return it == byName_.end() ? -1 : it->second;
}

int scalarId(const std::string& name) {
    int i = Registry::get().id(name);
    if (i < 0 || !Registry::get().decl(i).sig.empty())
        throw ExprError("unknown scalar symbol: " + name);
    return i;
}

Expr exprOne() { return exprConst(Coeff(1)); }
Expr exprConst(Coeff c) {
    Expr e;
    e.terms.push_back(Term{std::move(c), {}});
    return e;
}
Expr exprTerm(Term t) {
    Expr e;
    e.terms.push_back(std::move(t));
    return e;
}

Expr operator+(const Expr& a, const Expr& b) {
    Expr r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return r;
}

Expr operator-(const Expr& a, const Expr& b) {
    return a + scale(b, Coeff(-1));
}

Expr scale(const Expr& e, const Coeff& c) {
    Expr r = e;
    for (auto& t : r.terms) t.c = t.c * c;
    return r;
}

static Index conjIndex(const Index& i) {
    return Index{oppFam(i.fam), i.up, i.lab};
}

Expr conjugate(const Expr& e) {
    Expr r;
    for (const auto& t : e.terms) {
        Term s;
        s.c = t.c.conj();
        for (const auto& f : t.fs) {
            Factor g;
            g.sym = f.sym;
            g.cj = !f.cj;
            for (auto& d : f.deriv) g.deriv.push_back(conjIndex(d));
            for (auto& x : f.slots) g.slots.push_back(conjIndex(x));
            s.fs.push_back(std::move(g));
        }
        r.terms.push_back(std::move(s));
    }
    return r;
}

std::map<int, int> labelCounts(const Term& t) {
    std::map<int, int> m;
    for (const auto& f : t.fs) {
        for (const auto& d : f.deriv)
            if (d.fam != Fam::Reeb) m[d.lab]++;
        for (const auto& s : f.slots)
            if (s.fam != Fam::Reeb) m[s.lab]++;
    }
    return m;
}

std::map<int, Index> freeIndices(const Term& t) {
    auto counts = labelCounts(t);
    std::map<int, Index> r;
    for (const auto& f : t.fs) {
        for (const auto& d : f.deriv)
            if (d.fam != Fam::Reeb && counts[d.lab] == 1) r[d.lab] = d;
        for (const auto& s : f.slots)
            if (s.fam != Fam::Reeb && counts[s.lab] == 1) r[s.lab] = s;
    }
    return r;
}

void validateTerm(const Term& t) {
    std::map<int, std::vector<Index>> occ;
    for (const auto& f : t.fs) {
        if (f.sym < 0 || f.sym >= Registry::get().size())
            throw ExprError("bad symbol id");
        const auto& d = Registry::get().decl(f.sym);
        if (f.slots.size() != d.sig.size())
            throw ExprError("slot arity mismatch for " + d.name);
        for (const auto& i : f.deriv)
            if (i.fam != Fam::Reeb) occ[i.lab].push_back(i);
        for (const auto& i : f.slots) {
            if (i.fam == Fam::Reeb) throw ExprError("reeb slot");
            occ[i.lab].push_back(i);
        }
    }
    for (auto& [lab, v] : occ) {
        if (v.size() > 2) throw ExprError("label used more than twice");
        if (v.size() == 2) {
            if (v[0].fam != v[1].fam || v[0].up == v[1].up)
                throw ExprError("bad contraction pairing");
        }
    }
}

RatFn termWeight(const Term& t) {
    RatFn w(0);
    for (const auto& f : t.fs) {
        w = w + Registry::get().decl(f.sym).weight;
        for (const auto& d : f.deriv) {
            if (d.fam == Fam::Reeb) w = w - RatFn(1);
            else if (d.up) w = w - RatFn(1);
        }
        for (const auto& s : f.slots)
            if (s.up) w = w - RatFn(1);
    }
    return w;
}

Expr mulShared(const Expr& a, const Expr& b) {
    Expr r;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            Term t;
            t.c = ta.c * tb.c;
            t.fs = ta.fs;
            t.fs.insert(t.fs.end(), tb.fs.begin(), tb.fs.end());
            r.terms.push_back(std::move(t));
        }
    return r;
}

static Term relabelDummies(const Term& t, LabelGen& lg) {
    auto counts = labelCounts(t);
    std::map<int, int> ren;
    for (auto& [lab, c] : counts)
        if (c == 2) ren[lab] = lg.fresh();
    Term r = t;
    for (auto& f : r.fs) {
        for (auto& d : f.deriv)
            if (d.fam != Fam::Reeb && ren.count(d.lab)) d.lab = ren[d.lab];
        for (auto& s : f.slots)
            if (ren.count(s.lab)) s.lab = ren[s.lab];
    }
    return r;
}

Expr mul(const Expr& a, const Expr& b, LabelGen& lg) {
    Expr bb;
    for (const auto& t : b.terms) bb.terms.push_back(relabelDummies(t, lg));
    return mulShared(a, bb);
}

Expr applyDeriv(const Index& d, const Expr& e) {
    Expr r;
    for (const auto& t : e.terms) {
        for (size_t j = 0; j < t.fs.size(); j++) {
            if (Registry::get().decl(t.fs[j].sym).parallel) continue;
            Term s = t;
            s.fs[j].deriv.insert(s.fs[j].deriv.begin(), d);
            r.terms.push_back(std::move(s));
        }
        // constant term: derivative drops it
    }
    return r;
}

Expr applyPrefix(const std::vector<Index>& pfx, const Expr& e) {
    Expr r = e;
    for (auto it = pfx.rbegin(); it != pfx.rend(); ++it) r = applyDeriv(*it, r);
    return r;
}

int tailRank(const Factor& f, int from) {
    std::map<int, int> cnt;
    auto see = [&](const Index& i) {
        if (i.fam != Fam::Reeb) cnt[i.lab]++;
    };
    for (size_t k = from; k < f.deriv.size(); k++) see(f.deriv[k]);
    for (const auto& s : f.slots) see(s);
    int r = 0;
    for (auto& [lab, c] : cnt)
        if (c == 1) r++;
    return r;
}

Index tailFreeIndex(const Factor& f, int from) {
    std::map<int, int> cnt;
    for (size_t k = from; k < f.deriv.size(); k++)
        if (f.deriv[k].fam != Fam::Reeb) cnt[f.deriv[k].lab]++;
    for (const auto& s : f.slots)
        if (s.fam != Fam::Reeb) cnt[s.lab]++;
    for (size_t k = from; k < f.deriv.size(); k++)
        if (f.deriv[k].fam != Fam::Reeb && cnt[f.deriv[k].lab] == 1)
            return f.deriv[k];
    for (const auto& s : f.slots)
        if (s.fam != Fam::Reeb && cnt[s.lab] == 1) return s;
    throw ExprError("tailFreeIndex: no free index");
}

// ---------------------------------------------------------------------------
// normalization

namespace {

Factor hFactor(Index a, Index b) {
    Factor h;
    h.sym = SYM_H;
    h.slots = {a, b};
    return h;
}

// Replace every occurrence of label `from` (with any fam/position) by the
// exact index `to`.  Used by Levi-form elimination.
void replaceLabel(Term& t, int from, const Index& to) {
    for (auto& f : t.fs) {
        for (auto& d : f.deriv)
            if (d.fam != Fam::Reeb && d.lab == from) d = to;
        for (auto& s : f.slots)
            if (s.lab == from) s = to;
    }
}

// One pass of structural rewrites; returns the list of replacement terms and
// sets `changed`.  dim == 1 additionally forces the curvature and Schouten
// tensor into trace form.
std::vector<Term> preRewriteOnce(const Term& t0, int dim, bool& changed) {
    const auto& reg = Registry::get();
    Term t = t0;
    changed = false;

    for (size_t j = 0; j < t.fs.size(); j++) {
        Factor& f = t.fs[j];
        const auto& d = reg.decl(f.sym);

        // fold conjugates of real (hermitian) tensors back to the base symbol
        if (f.cj && d.herm) {
            std::vector<Index> ns(f.slots.size());
            for (size_t k = 0; k < ns.size(); k++) ns[k] = f.slots[(*d.herm)[k]];
            f.slots = std::move(ns);
            f.cj = false;
            changed = true;
            return {t};
        }

        if (f.sym == SYM_H) {
            Index a = f.slots[0], b = f.slots[1];
            // full self-trace
            if (a.lab == b.lab && a.fam == b.fam && a.up != b.up) {
                Term r = t;
                r.fs.erase(r.fs.begin() + j);
                r.c = r.c * (dim == 0 ? Coeff::n() : Coeff(dim));
                changed = true;
                return {r};
            }
            auto counts = labelCounts(t);
            for (int which = 0; which < 2; which++) {
                Index s = which ? b : a, o = which ? a : b;
                if (counts[s.lab] == 2) {
                    // contracted: erase h and relabel the partner of s to o
                    Term r = t;
                    r.fs.erase(r.fs.begin() + j);
                    replaceLabel(r, s.lab, o);
                    changed = true;
                    return {r};
                }
            }
        }

        if (f.sym == SYM_RM) {
            // internal trace -> Ricci -> (n+2) Pab + P h
            for (int i1 = 0; i1 < 4 && !changed; i1++)
                for (int i2 = i1 + 1; i2 < 4; i2++) {
                    const Index &x = f.slots[i1], &y = f.slots[i2];
                    if (x.fam != Fam::Reeb && x.lab == y.lab && x.fam == y.fam &&
                        x.up != y.up) {
                        std::vector<Index> rest;
                        for (int k = 0; k < 4; k++)
                            if (k != i1 && k != i2) rest.push_back(f.slots[k]);
                        // order so the Holo-declared slot comes first
                        // (slots 0,2 are Holo-declared in the base instance)
                        std::vector<int> keep;
                        for (int k = 0; k < 4; k++)
                            if (k != i1 && k != i2) keep.push_back(k);
                        bool firstHolo = (keep[0] % 2 == 0) != f.cj;
                        Index sa = firstHolo ? rest[0] : rest[1];
                        Index sb = firstHolo ? rest[1] : rest[0];
                        Term ta = t, tb = t;
                        ta.fs[j].sym = SYM_PAB;
                        ta.fs[j].slots = {sa, sb};
                        ta.c = ta.c * Coeff(RatFn(Poly(std::vector<Rat>{2, 1})));  // n+2
                        tb.fs[j].sym = SYM_P;
                        tb.fs[j].slots = {};
                        tb.fs.push_back(hFactor(sa, sb));
                        changed = true;
                        return {ta, tb};
                    }
                }
            if (dim == 1) {
                // R_{ab'cd'} = R h_{ab'} h_{cd'} = 4 P h h at n = 1
                Term r = t;
                Index s0 = f.slots[0], s1 = f.slots[1], s2 = f.slots[2],
                      s3 = f.slots[3];
                bool cj = f.cj;
                r.fs[j].sym = SYM_P;
                r.fs[j].cj = false;
                r.fs[j].slots = {};
                // base instance: slots 0,2 Holo-declared; keep pairing (0,1),(2,3)
                r.fs.push_back(cj ? hFactor(s1, s0) : hFactor(s0, s1));
                r.fs.push_back(cj ? hFactor(s3, s2) : hFactor(s2, s3));
                r.c = r.c * Coeff(4);
                changed = true;
                return {r};
            }
        }

        if (f.sym == SYM_PAB) {
            const Index &a = f.slots[0], &b = f.slots[1];
            if (a.fam != Fam::Reeb && a.lab == b.lab && a.fam == b.fam &&
                a.up != b.up) {
                Term r = t;
                r.fs[j].sym = SYM_P;
                r.fs[j].slots = {};
                changed = true;
                return {r};
            }
            if (dim == 1) {
                Term r = t;
                Index s0 = a, s1 = b;
                bool cj = f.cj;
                r.fs[j].sym = SYM_P;
                r.fs[j].cj = false;
                r.fs[j].slots = {};
                r.fs.push_back(cj ? hFactor(s1, s0) : hFactor(s0, s1));
                changed = true;
                return {r};
            }
        }

        // conjugate of a scalar without herm marking cannot occur (all our
        // scalars are real): fold unconditionally
        if (f.cj && d.sig.empty()) {
            f.cj = false;
            changed = true;
            return {t};
        }
    }
    return {t};
}

std::vector<Term> preRewrite(const Term& t0, int dim) {
    std::vector<Term> work{t0}, done;
    int guard = 0;
    while (!work.empty()) {
        if (++guard > 100000) throw ExprError("preRewrite did not terminate");
        Term t = work.back();
        work.pop_back();
        bool changed = false;
        auto out = preRewriteOnce(t, dim, changed);
        if (changed)
            work.insert(work.end(), out.begin(), out.end());
        else
            done.push_back(std::move(out[0]));
    }
    return done;
}

// --- canonical form search ---

long long packIndex(const Index& i, std::map<int, int>& dummyMap, int& nextDummy,
                    const std::map<int, int>& counts) {
    if (i.fam == Fam::Reeb) return 6;
    long long base = (long long)i.fam * 2 + (i.up ? 1 : 0);
    long long lab;
    if (counts.at(i.lab) == 1) {
        lab = (1LL << 32) | i.lab;  // free label: stable identity
    } else {
        auto it = dummyMap.find(i.lab);
        if (it == dummyMap.end()) it = dummyMap.emplace(i.lab, nextDummy++).first;
        lab = it->second;
    }
    return base * (1LL << 34) + lab + 8;
}

void encodeFactor(const Factor& f, std::map<int, int>& dummyMap, int& nextDummy,
                  const std::map<int, int>& counts, std::vector<long long>& out) {
    out.push_back(f.sym);
    out.push_back(f.cj ? 1 : 0);
    out.push_back((int)f.deriv.size());
    for (const auto& d : f.deriv) out.push_back(packIndex(d, dummyMap, nextDummy, counts));
    for (const auto& s : f.slots) out.push_back(packIndex(s, dummyMap, nextDummy, counts));
}

// all derivative prefixes reachable by exact commutations: adjacent
// transpositions of same-direction derivatives over rank-zero tails
std::vector<std::vector<Index>> prefixVariants(const Factor& f) {
    auto key = [](const std::vector<Index>& v) {
        std::vector<int> k;
        for (auto& i : v) {
            k.push_back((int)i.fam * 2 + i.up);
            k.push_back(i.fam == Fam::Reeb ? -1 : i.lab);
        }
        return k;
    };
    std::set<std::vector<int>> seen;
    std::deque<std::vector<Index>> work{f.deriv};
    std::vector<std::vector<Index>> out;
    seen.insert(key(f.deriv));
    while (!work.empty()) {
        auto v = work.front();
        work.pop_front();
        out.push_back(v);
        if (out.size() > 3000) throw ExprError("prefix variant explosion");
        Factor g = f;
        g.deriv = v;
        for (size_t i = 0; i + 1 < v.size(); i++) {
            if (dirClass(v[i]) != dirClass(v[i + 1])) continue;
            if (v[i].fam != Fam::Reeb && tailRank(g, (int)i + 2) != 0) continue;
            auto w = v;
            std::swap(w[i], w[i + 1]);
            if (seen.insert(key(w)).second) work.push_back(w);
        }
    }
    return out;
}

std::vector<Factor> factorVariants(const Factor& f) {
    const auto& reg = Registry::get();
    std::vector<std::vector<int>> perms;
    if (f.sym == SYM_H)
        perms = {{0, 1}, {1, 0}};
    else
        perms = reg.group(f.sym);
    auto prefixes = prefixVariants(f);
    std::vector<Factor> out;
    for (const auto& p : perms)
        for (const auto& pre : prefixes) {
            Factor g = f;
            g.deriv = pre;
            for (size_t k = 0; k < p.size(); k++) g.slots[k] = f.slots[p[k]];
            out.push_back(std::move(g));
        }
    return out;
}

struct CanonState {
    std::vector<long long> enc;
    std::vector<Factor> chosen;
    std::vector<bool> used;
    std::map<int, int> dummyMap;
    int nextDummy = 0;
};

// exact minimal encoding over factor orderings, symmetry images and free
// prefix commutations, with first-occurrence dummy renumbering
Term canonicalizeTerm(const Term& t) {
    auto counts = labelCounts(t);
    size_t nf = t.fs.size();
    std::vector<std::vector<Factor>> vars;
    for (const auto& f : t.fs) vars.push_back(factorVariants(f));

    std::vector<CanonState> states(1);
    states[0].used.assign(nf, false);

    for (size_t step = 0; step < nf; step++) {
        std::vector<CanonState> next;
        std::vector<long long> best;
        bool haveBest = false;
        for (const auto& st : states) {
            for (size_t fi = 0; fi < nf; fi++) {
                if (st.used[fi]) continue;
                for (const auto& v : vars[fi]) {
                    auto dm = st.dummyMap;
                    int nd = st.nextDummy;
                    std::vector<long long> enc;
                    encodeFactor(v, dm, nd, counts, enc);
                    if (haveBest && enc > best) continue;
                    if (!haveBest || enc < best) {
                        best = enc;
                        haveBest = true;
                        next.clear();
                    }
                    CanonState ns = st;
                    ns.enc.insert(ns.enc.end(), enc.begin(), enc.end());
                    ns.chosen.push_back(v);
                    ns.used[fi] = true;
                    ns.dummyMap = std::move(dm);
                    ns.nextDummy = nd;
                    next.push_back(std::move(ns));
                }
            }
        }
        // dedup states that picked the same factors the same way
        auto stateKey = [](const CanonState& s) {
            std::ostringstream os;
            for (bool u : s.used) os << (u ? '1' : '0');
            for (const auto& f : s.chosen) os << '|' << termKey(Term{Coeff(0), {f}});
            return os.str();
        };
        std::sort(next.begin(), next.end(),
                  [&](const CanonState& a, const CanonState& b) {
                      return stateKey(a) < stateKey(b);
                  });
        next.erase(std::unique(next.begin(), next.end(),
                               [&](const CanonState& a, const CanonState& b) {
                                   return stateKey(a) == stateKey(b);
                               }),
                   next.end());
        if (next.size() > 20000) throw ExprError("canonicalization state explosion");
        states = std::move(next);
    }

    Term r;
    r.c = t.c;
    r.fs = states[0].chosen;
    const auto& dm = states[0].dummyMap;
    for (auto& f : r.fs) {
        for (auto& d : f.deriv)
            if (d.fam != Fam::Reeb && counts[d.lab] == 2) d.lab = kDummyBase + dm.at(d.lab);
        for (auto& s : f.slots)
            if (counts[s.lab] == 2) s.lab = kDummyBase + dm.at(s.lab);
    }
    return r;
}

// a contracted pair may sit in either family (raising both members with the
// Levi form is exact since it is parallel); orient every pair to Holo so the
// two presentations merge
void orientPairs(Term& t) {
    auto counts = labelCounts(t);
    for (auto& f : t.fs) {
        for (auto& d : f.deriv)
            if (d.fam == Fam::Anti && counts[d.lab] == 2)
                d = idx(Fam::Holo, !d.up, d.lab);
        for (auto& s : f.slots)
            if (s.fam == Fam::Anti && counts[s.lab] == 2)
                s = idx(Fam::Holo, !s.up, s.lab);
    }
}

// at dim == 1 the index space is one dimensional: in an adapted frame every
// index takes its single value and h = 1, so a term's value is the product of
// per-factor components determined by variance signatures alone; the
// contraction topology and label placement are irrelevant
std::string dim1Key(const Term& t) {
    std::vector<std::string> fs;
    for (const auto& f : t.fs) {
        std::ostringstream os;
        os << f.sym << '|' << f.cj << '|';
        for (const auto& d : f.deriv)
            os << (d.fam == Fam::Reeb ? 0 : (int)d.fam * 2 + d.up + 1) << ',';
        os << '|';
        for (const auto& s : f.slots) os << ((int)s.fam * 2 + s.up + 1) << ',';
        fs.push_back(os.str());
    }
    std::sort(fs.begin(), fs.end());
    std::string r;
    for (auto& s : fs) r += s + "#";
    return r;
}

}  // namespace

std::string termKey(const Term& t) {
    std::ostringstream os;
    for (const auto& f : t.fs) {
        os << f.sym << '|' << f.cj << '|';
        for (const auto& d : f.deriv)
            os << (int)d.fam << ',' << d.up << ',' << (d.fam == Fam::Reeb ? -1 : d.lab) << ';';
        os << '|';
        for (const auto& s : f.slots)
            os << (int)s.fam << ',' << s.up << ',' << s.lab << ';';
        os << '#';
    }
    return os.str();
}

Expr normalize(const Expr& e, int dim) {
    std::vector<Term> flat;
    for (const auto& t : e.terms) {
        Term tt = t;
        if (dim != 0) tt.c = tt.c.evalAt(Rat(dim));
        if (tt.c.isZero()) continue;
        auto pre = preRewrite(tt, dim);
        flat.insert(flat.end(), pre.begin(), pre.end());
    }
    std::map<std::string, Term> merged;
    for (auto& t : flat) {
        if (t.c.isZero()) continue;
        validateTerm(t);
        orientPairs(t);
        Term c = canonicalizeTerm(t);
        auto key = dim == 1 ? dim1Key(c) : termKey(c);
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(key, std::move(c));
        else
            it->second.c = it->second.c + c.c;
    }
    Expr r;
    for (auto& [k, t] : merged)
        if (!t.c.isZero()) r.terms.push_back(std::move(t));
    return r;
}

bool isZero(const Expr& e, int dim) { return normalize(e, dim).terms.empty(); }

}  // namespace cr
