#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cr/qn.hpp"

using namespace cr;

TEST_CASE("polynomial arithmetic") {
    Poly n = Poly::n();
    Poly p = n * n - Poly(Rat(1));        // n^2 - 1
    Poly q = n - Poly(Rat(1));            // n - 1
    CHECK(p.degree() == 2);
    CHECK(p.eval(Rat(3)) == Rat(8));
    Poly g = Poly::gcd(p, q);
    CHECK(g == q.monic());
    Poly quo, rem;
    Poly::divmod(p, q, quo, rem);
    CHECK(rem.isZero());
    CHECK(quo == n + Poly(Rat(1)));
}

TEST_CASE("rational function reduction") {
    Poly n = Poly::n();
    RatFn r(n * n - Poly(Rat(1)), n - Poly(Rat(1)));  // reduces to n + 1
    CHECK(r == RatFn(n + Poly(Rat(1))));
    CHECK(r.eval(Rat(1)) == Rat(2));  // no pole after reduction

    RatFn s(Poly(Rat(1)), n - Poly(Rat(1)));
    CHECK_THROWS_AS(s.eval(Rat(1)), PoleAtLimit);
    CHECK(s.eval(Rat(3)) == Rat(1, 2));
}

TEST_CASE("field operations") {
    RatFn n = RatFn::n();
    RatFn a = (n + RatFn(1)) / (n + RatFn(2));
    RatFn b = (n + RatFn(2)) / (n + RatFn(1));
    CHECK(a * b == RatFn(1));
    CHECK(a + (-a) == RatFn(0));
    CHECK((a - b) * (a + b) == a * a - b * b);
}

TEST_CASE("divisibility of numerators") {
    Poly n = Poly::n();
    RatFn r((n - Poly(Rat(1))) * (n - Poly(Rat(1))) * (n + Poly(Rat(3))), n + Poly(Rat(2)));
    CHECK(r.numDivisibleBy(Rat(1), 2));
    CHECK(!r.numDivisibleBy(Rat(1), 3));
    CHECK(r.numDivisibleBy(Rat(-3), 1));
    CHECK(!RatFn(1).numDivisibleBy(Rat(1), 1));
    CHECK(RatFn(0).numDivisibleBy(Rat(1), 5));
}

TEST_CASE("gaussian rational coefficients") {
    Coeff i = Coeff::i();
    CHECK(i * i == Coeff(-1));
    CHECK(i.conj() == -i);
    Coeff z(RatFn(2), RatFn(3));
    CHECK(z * z.inverse() == Coeff(1));
    CHECK((z + z.conj()).im.isZero());

    Coeff w = Coeff::n() + Coeff::i();  // n + i
    Coeff winv = w.inverse();
    CHECK(w * winv == Coeff(1));
    Coeff at2 = w.evalAt(Rat(2));
    CHECK(at2.re == RatFn(2));
    CHECK(at2.im == RatFn(1));
}

TEST_CASE("printing is stable") {
    RatFn r(Poly(std::vector<Rat>{1, 1}), Poly(std::vector<Rat>{2, 1}));
    CHECK(r.str().find("n") != std::string::npos);
    CHECK(RatFn(0).str() == "0");
}
