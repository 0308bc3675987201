#pragma once

// Exact model instantiation: the normalized CR three-sphere and the
// Heisenberg group.  Ring elements are polynomials with coefficients in
// Q(i, sqrt2) (sphere: in z1, z1b, z2, z2b modulo z2*z2b -> 1 - z1*z1b;
// heisenberg: in z, zb, t), times formal markers e^{k sigma/2}.  All forms
// are written in the fixed base coframe (theta, theta1, theta1b); conformal
// structures are solved exactly from the n=1 structure equations.

#include "cr/calculus.hpp"

#include <array>
#include <functional>
#include <map>

namespace cr {

struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& m) : std::runtime_error(m) {}
};

// (a + b i) + (c + d i) sqrt2
struct K {
    Rat a, b, c, d;
    K() : a(0), b(0), c(0), d(0) {}
    K(Rat x) : a(std::move(x)), b(0), c(0), d(0) {}
    K(long x) : a(x), b(0), c(0), d(0) {}
    K(Rat x, Rat y, Rat u, Rat v)
        : a(std::move(x)), b(std::move(y)), c(std::move(u)), d(std::move(v)) {}
    static K i() { return K(Rat(0), Rat(1), Rat(0), Rat(0)); }
    static K sqrt2() { return K(Rat(0), Rat(0), Rat(1), Rat(0)); }

    bool isZero() const { return a == 0 && b == 0 && c == 0 && d == 0; }
    K conj() const { return K(a, -b, c, -d); }
    K operator-() const { return K(-a, -b, -c, -d); }
    K operator+(const K& o) const { return K(a + o.a, b + o.b, c + o.c, d + o.d); }
    K operator-(const K& o) const { return K(a - o.a, b - o.b, c - o.c, d - o.d); }
    K operator*(const K& o) const;
    K inverse() const;
    K operator/(const K& o) const { return *this * o.inverse(); }
    bool operator==(const K& o) const = default;
    std::string str() const;
};

enum class Model { Sphere, Heisenberg };

// monomial: marker power k (of e^{sigma/2}) and exponents
// sphere: e = (z1, z1b, z2, z2b); heisenberg: e = (z, zb, t, unused)
struct Mono {
    int k = 0;
    std::array<int, 4> e{0, 0, 0, 0};
    auto operator<=>(const Mono&) const = default;
};

struct RingEl {
    Model model = Model::Sphere;
    std::map<Mono, K> c;

    bool isZero() const { return c.empty(); }
    std::string str() const;
};

RingEl ringZero(Model m);
RingEl ringConst(Model m, K v);
RingEl ringMono(Model m, Mono mo, K v);
// coordinate generator: sphere 0..3 = z1, z1b, z2, z2b; heis 0..2 = z, zb, t
RingEl ringVar(Model m, int which);
// marker e^{k sigma / 2}
RingEl ringMarker(Model m, int k);

RingEl operator+(const RingEl&, const RingEl&);
RingEl operator-(const RingEl&, const RingEl&);
RingEl operator*(const RingEl&, const RingEl&);
RingEl scale(const RingEl&, const K&);
RingEl conj(const RingEl&);
bool isReal(const RingEl&);

// parse z1, z2, z, t, i, sqrt2, Re(...), Im(...), conj(...), + - * / ^
RingEl parseRing(const std::string& src, Model m);

// base frame derivations (T0, Z0, Z0b); sigma enters through the marker rule
// d e^{k sigma/2} = (k/2) e^{k sigma/2} d sigma and must itself be marker free
struct Derivation {
    // base vector field: which in {0 = T0, 1 = Z0, 2 = Z0b}
    int which;
    RingEl sigma;
    RingEl operator()(const RingEl& f) const;
};

// exterior forms over the base coframe; components indexed
// deg 1: (theta, theta1, theta1b)
// deg 2: (theta^theta1, theta^theta1b, theta1^theta1b)
// deg 3: theta^theta1^theta1b
struct Form {
    Model model = Model::Sphere;
    int deg = 0;
    std::vector<RingEl> c;  // size 1, 3, 3, 1 for deg 0..3
};

Form formZero(Model m, int deg);
Form formScalar(const RingEl& f);
Form formBasis1(Model m, int which);  // theta, theta1, theta1b
Form operator+(const Form&, const Form&);
Form operator-(const Form&, const Form&);
Form wedge(const Form&, const Form&);
Form scale(const Form&, const RingEl&);
Form exteriorD(const Form&, const RingEl& sigma);

// frame vector: coefficients (t, z, zb) against (T0, Z0, Z0b)
struct FrameVec {
    RingEl t, z, zb;
};
// evaluate a one- or two-form on frame vectors
RingEl evalForm(const Form& f, const FrameVec& x);
RingEl evalForm(const Form& f, const FrameVec& x, const FrameVec& y);

struct Structure {
    Model model = Model::Sphere;
    RingEl sigma;            // theta = e^sigma theta0
    RingEl A11, R;           // torsion component and scalar curvature
    RingEl w0, wp, wm;       // omega_1^1 components against (th, th1, th1b)
    RingEl divA;             // nabla^beta A_{1 beta} extracted from d omega
    Form theta, theta1, theta1b, omega;  // in the base coframe
    FrameVec T, Z, Zb;       // dual frame of (theta, theta1, theta1b)

    // frame derivatives of a ring element
    RingEl dT(const RingEl& f) const;
    RingEl dZ(const RingEl& f) const;
    RingEl dZb(const RingEl& f) const;
};

Structure standardStructure(Model m);
// base must be a standard structure; sigma real and marker free
Structure conformalStructure(const Structure& base, const RingEl& sigma);

// exact residuals of the defining structure equations; all must be zero
struct StructureResiduals {
    Form contact;     // d theta - i theta1 ^ theta1b
    Form coframe;     // d theta1 - theta1 ^ omega - theta ^ tau1
    RingEl reality;   // w0 + conj(w0)
    RingEl curvature; // conj(R) - R
};
StructureResiduals structureResiduals(const Structure& s);

// evaluate a calculus expression at n = 1 on the structure; scalar symbols
// are looked up in vals (by registry name), h = 1, P = R/4
RingEl evaluate(const Expr& e, const Structure& s,
                const std::map<std::string, RingEl>& vals);

// named operator application, e.g. "P4", "P4prime", "Q4prime", "Db",
// "Palpha" (coefficient against theta1), "D0"
RingEl applyOperator(const std::string& op, const RingEl& f, const Structure& s);

// real and imaginary parts of holomorphic monomials up to total degree
std::vector<RingEl> pluriharmonicBasis(Model m, int degree);

// integral over the sphere against theta0 ^ d theta0, as a multiple of pi^2;
// throws on residual markers or non-sphere model
K integrate(const RingEl& f, const Structure& s);

// exact moment of |z1|^{2a} |z2|^{2c} against theta0 ^ d theta0 / pi^2
Rat sphereMoment(int a, int c);

}  // namespace cr
