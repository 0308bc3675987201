#include "cr/models/models.hpp"

#include <sstream>

namespace cr {

K K::operator*(const K& o) const {
    // ((a+bi) + (c+di)s)((a'+b'i) + (c'+d'i)s), s^2 = 2
    Rat ra = a * o.a - b * o.b + 2 * (c * o.c - d * o.d);
    Rat rb = a * o.b + b * o.a + 2 * (c * o.d + d * o.c);
    Rat rc = a * o.c - b * o.d + c * o.a - d * o.b;
    Rat rd = a * o.d + b * o.c + c * o.b + d * o.a;
    return K(std::move(ra), std::move(rb), std::move(rc), std::move(rd));
}

K K::inverse() const {
    if (isZero()) throw ModelError("division by zero in Q(i, sqrt2)");
    // multiply by the sqrt2-conjugate: (x + ys)(x - ys) = x^2 - 2y^2 in Q(i)
    K s2c(a, b, -c, -d);
    K nrm = *this * s2c;  // = (na + nb i) with no sqrt2 part
    Rat na = nrm.a, nb = nrm.b;
    Rat den = na * na + nb * nb;
    if (den == 0) throw ModelError("division by zero in Q(i, sqrt2)");
    // 1/(na + nb i) = (na - nb i)/den
    K inv(na / den, -nb / den, Rat(0), Rat(0));
    return s2c * inv;
}

std::string K::str() const {
    std::ostringstream os;
    bool any = false;
    auto part = [&](const Rat& re, const Rat& im, const char* tag) {
        if (re == 0 && im == 0) return;
        if (any) os << " + ";
        any = true;
        os << "(" << re.str();
        if (im != 0) os << (im > 0 ? " + " : " - ") << Rat(abs(im)).str() << "*i";
        os << ")" << tag;
    };
    part(a, b, "");
    part(c, d, "*sqrt2");
    if (!any) return "0";
    return os.str();
}

}  // namespace cr
