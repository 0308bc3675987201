#include "cr/qn.hpp"

#include <sstream>

namespace cr {

Poly Poly::operator-() const {
    std::vector<Rat> r(c_);
    for (auto& x : r) x = -x;
    return Poly(std::move(r));
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<Rat> r(std::max(c_.size(), o.c_.size()), Rat(0));
    for (size_t i = 0; i < c_.size(); i++) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); i++) r[i] += o.c_[i];
    return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    if (isZero() || o.isZero()) return Poly();
    std::vector<Rat> r(c_.size() + o.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < c_.size(); i++)
        for (size_t j = 0; j < o.c_.size(); j++) r[i + j] += c_[i] * o.c_[j];
    return Poly(std::move(r));
}

void Poly::divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    if (b.isZero()) throw std::runtime_error("Poly division by zero");
    std::vector<Rat> rem = a.c_;
    std::vector<Rat> quot;
    int db = b.degree();
    if ((int)rem.size() - 1 >= db) quot.assign(rem.size() - db, Rat(0));
    while ((int)rem.size() - 1 >= db && !rem.empty()) {
        Rat f = rem.back() / b.lead();
        int shift = (int)rem.size() - 1 - db;
        quot[shift] = f;
        for (int i = 0; i <= db; i++) rem[shift + i] -= f * b.c_[i];
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
    }
    q = Poly(std::move(quot));
    r = Poly(std::move(rem));
}

Poly Poly::gcd(Poly a, Poly b) {
    while (!b.isZero()) {
        Poly q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

Poly Poly::monic() const {
    if (isZero()) return Poly();
    std::vector<Rat> r(c_);
    Rat l = lead();
    for (auto& x : r) x /= l;
    return Poly(std::move(r));
}

Rat Poly::eval(const Rat& x) const {
    Rat acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

static std::string ratStr(const Rat& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

std::string Poly::str() const {
    if (isZero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; k--) {
        Rat c = coeff(k);
        if (c == 0) continue;
        Rat a = c < 0 ? Rat(-c) : c;
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool unit = a == 1;
        if (k == 0 || !unit) os << ratStr(a);
        if (k > 0) {
            if (!unit) os << "*";
            os << "n";
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

RatFn::RatFn(Poly nu, Poly de) : num_(std::move(nu)), den_(std::move(de)) {
    if (den_.isZero()) throw std::runtime_error("RatFn zero denominator");
    reduce();
}

void RatFn::reduce() {
    if (num_.isZero()) {
        den_ = Poly(Rat(1));
        return;
    }
    Poly g = Poly::gcd(num_, den_);
    if (g.degree() > 0) {
        Poly q, r;
        Poly::divmod(num_, g, q, r);
        num_ = q;
        Poly::divmod(den_, g, q, r);
        den_ = q;
    }
    Rat l = den_.lead();
    if (l != 1) {
        std::vector<Rat> nn(num_.coeffs()), dd(den_.coeffs());
        for (auto& x : nn) x /= l;
        for (auto& x : dd) x /= l;
        num_ = Poly(std::move(nn));
        den_ = Poly(std::move(dd));
    }
}

RatFn RatFn::operator-() const {
    RatFn r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

RatFn RatFn::operator+(const RatFn& o) const {
    return RatFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFn RatFn::operator-(const RatFn& o) const { return *this + (-o); }

RatFn RatFn::operator*(const RatFn& o) const {
    return RatFn(num_ * o.num_, den_ * o.den_);
}

RatFn RatFn::operator/(const RatFn& o) const {
    if (o.isZero()) throw std::runtime_error("RatFn division by zero");
    return RatFn(num_ * o.den_, den_ * o.num_);
}

Rat RatFn::eval(const Rat& x) const {
    Rat d = den_.eval(x);
    if (d == 0) throw PoleAtLimit("pole at n = " + ratStr(x));
    return num_.eval(x) / d;
}

bool RatFn::numDivisibleBy(const Rat& root, int k) const {
    if (num_.isZero()) return true;
    if (den_.eval(root) == 0) return false;  // reduced, so a pole is a hard failure
    Poly lin(std::vector<Rat>{-root, Rat(1)});
    Poly cur = num_, q, r;
    for (int i = 0; i < k; i++) {
        Poly::divmod(cur, lin, q, r);
        if (!r.isZero()) return false;
        cur = q;
    }
    return true;
}

std::string RatFn::str() const {
    if (den_.degree() == 0) {
        if (num_.degree() <= 0) return num_.str();
        return "(" + num_.str() + ")";
    }
    std::string ns = num_.degree() > 0 ? "(" + num_.str() + ")" : num_.str();
    return ns + "/(" + den_.str() + ")";
}

Coeff Coeff::inverse() const {
    if (isZero()) throw std::runtime_error("Coeff division by zero");
    RatFn d = re * re + im * im;
    return Coeff(re / d, -(im / d));
}

std::string Coeff::str() const {
    if (im.isZero()) return re.str();
    std::string is = im.str() + "*i";
    if (im == RatFn(1)) is = "i";
    if (im == RatFn(-1)) is = "-i";
    if (re.isZero()) return is;
    if (is[0] == '-') return re.str() + " - " + is.substr(1);
    return re.str() + " + " + is;
}

}  // namespace cr
