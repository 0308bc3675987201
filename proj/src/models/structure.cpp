#include "cr/models/models.hpp"

namespace cr {

namespace {

RingEl vecApply(const FrameVec& v, const RingEl& f, const RingEl& sigma) {
    Derivation d0{0, sigma}, d1{1, sigma}, d2{2, sigma};
    return v.t * d0(f) + v.z * d1(f) + v.zb * d2(f);
}

// build the structure determined by theta = e^sigma theta0 and solve the
// n = 1 structure equations for the connection, torsion, and curvature
Structure solve(Model m, const RingEl& sigma) {
    Structure s;
    s.model = m;
    s.sigma = sigma;

    Derivation dz{1, sigma}, dzb{2, sigma};
    RingEl zs = dz(sigma), zbs = dzb(sigma);
    // e^{k sigma/2}, collapsing to 1 when sigma vanishes
    auto mk = [&](int k) {
        return sigma.isZero() ? ringConst(m, K(1)) : ringMarker(m, k);
    };
    RingEl es2 = mk(2), es1 = mk(1);
    RingEl em2 = mk(-2), em1 = mk(-1);
    RingEl zero = ringZero(m);
    K iK = K::i();

    // theta-hat = e^sigma theta0
    s.theta = scale(formBasis1(m, 0), es2);
    // theta1-hat = e^{sigma/2}(theta1 + i (Zb sigma) theta)
    s.theta1 = scale(formBasis1(m, 1), es1) +
               scale(formBasis1(m, 0), scale(es1 * zbs, iK));
    s.theta1b = scale(formBasis1(m, 2), es1) -
                scale(formBasis1(m, 0), scale(es1 * zs, iK));

    // dual frame
    s.Z = FrameVec{zero, em1, zero};
    s.Zb = FrameVec{zero, zero, em1};
    s.T = FrameVec{em2, scale(em2 * zbs, -iK), scale(em2 * zs, iK)};

    // d theta1 = theta1 ^ omega + theta ^ tau1 determines omega and the
    // torsion: against the hatted coframe,
    //   d theta1 = X th ^ th1 + Y th ^ th1b + Zc th1 ^ th1b
    // gives omega = -X th - conj(Zc) th1 + Zc th1b and A_11 = conj(Y)
    Form dth1 = exteriorD(s.theta1, sigma);
    RingEl X = evalForm(dth1, s.T, s.Z);
    RingEl Y = evalForm(dth1, s.T, s.Zb);
    RingEl Zc = evalForm(dth1, s.Z, s.Zb);
    if (!(X + conj(X)).isZero())
        throw ModelError("connection reality constraint failed");
    s.w0 = scale(X, K(-1));
    s.wp = scale(conj(Zc), K(-1));
    s.wm = Zc;
    s.A11 = conj(Y);
    s.omega = scale(s.theta, s.w0) + scale(s.theta1, s.wp) + scale(s.theta1b, s.wm);

    // d omega = R th1 ^ th1b + (div A) th1 ^ th - conj(div A) th1b ^ th
    Form dom = exteriorD(s.omega, sigma);
    s.R = evalForm(dom, s.Z, s.Zb);
    s.divA = evalForm(dom, s.Z, s.T);
    if (!(evalForm(dom, s.Zb, s.T) + conj(s.divA)).isZero())
        throw ModelError("torsion divergence mismatch in d omega");
    if (!isReal(s.R)) throw ModelError("scalar curvature is not real");
    return s;
}

}  // namespace

RingEl Structure::dT(const RingEl& f) const { return vecApply(T, f, sigma); }
RingEl Structure::dZ(const RingEl& f) const { return vecApply(Z, f, sigma); }
RingEl Structure::dZb(const RingEl& f) const { return vecApply(Zb, f, sigma); }

Structure standardStructure(Model m) { return solve(m, ringZero(m)); }

Structure conformalStructure(const Structure& base, const RingEl& sigma) {
    if (!base.sigma.isZero())
        throw ModelError("conformal change must start from a standard structure");
    if (sigma.model != base.model) throw ModelError("mixed models");
    if (!isReal(sigma)) throw ModelError("sigma must be real");
    for (const auto& [mo, v] : sigma.c)
        if (mo.k != 0) throw ModelError("sigma must be marker free");
    return solve(base.model, sigma);
}

StructureResiduals structureResiduals(const Structure& s) {
    StructureResiduals r;
    RingEl iEl = ringConst(s.model, K::i());
    r.contact = exteriorD(s.theta, s.sigma) -
                scale(wedge(s.theta1, s.theta1b), iEl);
    Form tau1 = scale(s.theta1b, conj(s.A11));
    r.coframe = exteriorD(s.theta1, s.sigma) - wedge(s.theta1, s.omega) -
                wedge(s.theta, tau1);
    r.reality = s.w0 + conj(s.w0);
    r.curvature = conj(s.R) - s.R;
    return r;
}

}  // namespace cr
