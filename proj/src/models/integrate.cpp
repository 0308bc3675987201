#include "cr/models/models.hpp"

namespace cr {

Rat sphereMoment(int a, int c) {
    if (a < 0 || c < 0) throw ModelError("negative moment exponent");
    // int |z1|^{2a} |z2|^{2c} theta0 ^ d theta0 = 16 pi^2 a! c! / (a+c+1)!
    Rat num(16);
    // a! c! / (a+c+1)! = 1 / [ (a+1)(a+2)...(a+c+1) choose-ish product ]
    Rat fa(1), fc(1), fs(1);
    for (int j = 2; j <= a; j++) fa *= j;
    for (int j = 2; j <= c; j++) fc *= j;
    for (int j = 2; j <= a + c + 1; j++) fs *= j;
    return num * fa * fc / fs;
}

K integrate(const RingEl& f, const Structure& s) {
    if (s.model != Model::Sphere)
        throw ModelError("exact integration is only available on the sphere");
    // the volume form of theta-hat = e^sigma theta0 is e^{2 sigma} theta0 ^
    // d theta0; the marker algebra must cancel exactly
    RingEl g = s.sigma.isZero() ? f : f * ringMarker(s.model, 4);
    K r;
    for (const auto& [mo, v] : g.c) {
        if (mo.k != 0)
            throw ModelError("integrand carries unresolved conformal factors");
        // torus invariance kills everything but |z1|^{2a} |z2|^{2c}; in the
        // reduced normal form the z2 pair only survives as the empty one
        if (mo.e[0] != mo.e[1] || mo.e[2] != mo.e[3]) continue;
        r = r + v * K(sphereMoment(mo.e[0], mo.e[2]));
    }
    return r;
}

}  // namespace cr
