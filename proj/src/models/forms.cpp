#include "cr/models/models.hpp"

namespace cr {

namespace {

int compCount(int deg) {
    switch (deg) {
        case 0: return 1;
        case 1: return 3;
        case 2: return 3;
        case 3: return 1;
    }
    throw ModelError("unsupported form degree");
}

// deg 2 component order: (0,1), (0,2), (1,2) against basis (th, th1, th1b)
int pairIdx(int i, int j) {
    if (i == 0 && j == 1) return 0;
    if (i == 0 && j == 2) return 1;
    if (i == 1 && j == 2) return 2;
    throw ModelError("bad basis pair");
}

void addAt(Form& f, int idx, const RingEl& v) { f.c[idx] = f.c[idx] + v; }

}  // namespace

Form formZero(Model m, int deg) {
    Form f;
    f.model = m;
    f.deg = deg;
    f.c.assign(compCount(deg), ringZero(m));
    return f;
}

Form formScalar(const RingEl& f) {
    Form r = formZero(f.model, 0);
    r.c[0] = f;
    return r;
}

Form formBasis1(Model m, int which) {
    Form r = formZero(m, 1);
    r.c[which] = ringConst(m, K(1));
    return r;
}

Form operator+(const Form& a, const Form& b) {
    if (a.model != b.model || a.deg != b.deg) throw ModelError("form mismatch");
    Form r = a;
    for (size_t j = 0; j < r.c.size(); j++) r.c[j] = r.c[j] + b.c[j];
    return r;
}

Form operator-(const Form& a, const Form& b) {
    if (a.model != b.model || a.deg != b.deg) throw ModelError("form mismatch");
    Form r = a;
    for (size_t j = 0; j < r.c.size(); j++) r.c[j] = r.c[j] - b.c[j];
    return r;
}

Form scale(const Form& a, const RingEl& v) {
    Form r = a;
    for (auto& c : r.c) c = c * v;
    return r;
}

Form wedge(const Form& a, const Form& b) {
    if (a.model != b.model) throw ModelError("form mismatch");
    int deg = a.deg + b.deg;
    if (deg > 3) throw ModelError("wedge above the top degree");
    if (a.deg == 0) return scale(b, a.c[0]);
    if (b.deg == 0) return scale(a, b.c[0]);
    Form r = formZero(a.model, deg);
    if (a.deg == 1 && b.deg == 1) {
        for (int i = 0; i < 3; i++)
            for (int j = 0; j < 3; j++) {
                if (i == j) continue;
                RingEl v = a.c[i] * b.c[j];
                if (i < j)
                    addAt(r, pairIdx(i, j), v);
                else
                    addAt(r, pairIdx(j, i), scale(v, K(-1)));
            }
        return r;
    }
    // 1 ^ 2 or 2 ^ 1 -> top degree
    const Form& one = a.deg == 1 ? a : b;
    const Form& two = a.deg == 1 ? b : a;
    static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int i = 0; i < 3; i++)
        for (int p = 0; p < 3; p++) {
            int j = pairs[p][0], k = pairs[p][1];
            if (i == j || i == k) continue;
            // sign of permutation (i, j, k) of (0, 1, 2) with j < k
            int sgn = (i == 0) ? 1 : (i == 1 ? -1 : 1);
            addAt(r, 0, scale(one.c[i] * two.c[p], K(Rat(sgn))));
        }
    return r;
}

Form exteriorD(const Form& f, const RingEl& sigma) {
    Model m = f.model;
    Derivation dv[3] = {{0, sigma}, {1, sigma}, {2, sigma}};
    auto dScalar = [&](const RingEl& g) {
        Form r = formZero(m, 1);
        for (int j = 0; j < 3; j++) r.c[j] = dv[j](g);
        return r;
    };
    // d of the basis one-forms
    auto dBasis = [&](int which) {
        Form r = formZero(m, 2);
        if (m == Model::Sphere) {
            // d th = i th1 ^ th1b, d th1 = i th ^ th1, d th1b = -i th ^ th1b
            if (which == 0)
                r.c[pairIdx(1, 2)] = ringConst(m, K::i());
            else if (which == 1)
                r.c[pairIdx(0, 1)] = ringConst(m, K::i());
            else
                r.c[pairIdx(0, 2)] = ringConst(m, -K::i());
        } else {
            // d th = i th1 ^ th1b, d th1 = d th1b = 0
            if (which == 0) r.c[pairIdx(1, 2)] = ringConst(m, K::i());
        }
        return r;
    };
    if (f.deg == 0) return dScalar(f.c[0]);
    if (f.deg == 1) {
        Form r = formZero(m, 2);
        for (int j = 0; j < 3; j++)
            r = r + wedge(dScalar(f.c[j]), formBasis1(m, j)) + scale(dBasis(j), f.c[j]);
        return r;
    }
    if (f.deg == 2) {
        Form r = formZero(m, 3);
        static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int p = 0; p < 3; p++) {
            Form bi = formBasis1(m, pairs[p][0]), bj = formBasis1(m, pairs[p][1]);
            r = r + wedge(dScalar(f.c[p]), wedge(bi, bj)) +
                scale(wedge(dBasis(pairs[p][0]), bj) - wedge(bi, dBasis(pairs[p][1])),
                      f.c[p]);
        }
        return r;
    }
    return formZero(m, 3);  // d of a top form would exceed the dimension
}

RingEl evalForm(const Form& f, const FrameVec& x) {
    if (f.deg != 1) throw ModelError("expected a one-form");
    return f.c[0] * x.t + f.c[1] * x.z + f.c[2] * x.zb;
}

RingEl evalForm(const Form& f, const FrameVec& x, const FrameVec& y) {
    if (f.deg != 2) throw ModelError("expected a two-form");
    auto comp = [](const FrameVec& v, int j) {
        return j == 0 ? v.t : (j == 1 ? v.z : v.zb);
    };
    static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    RingEl r = ringZero(f.model);
    for (int p = 0; p < 3; p++) {
        int i = pairs[p][0], j = pairs[p][1];
        r = r + f.c[p] * (comp(x, i) * comp(y, j) - comp(x, j) * comp(y, i));
    }
    return r;
}

}  // namespace cr
