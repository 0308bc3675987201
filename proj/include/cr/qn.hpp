#pragma once

// Exact coefficient arithmetic for the calculus engine.
// Coeff is a Gaussian rational over Q(n): re + i*im with re, im
// reduced rational functions of the CR dimension n.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr {

using Rat = boost::multiprecision::cpp_rational;

struct PoleAtLimit : std::runtime_error {
    explicit PoleAtLimit(const std::string& m) : std::runtime_error(m) {}
};

// Dense polynomial in n over Q, coefficients ascending by degree.
class Poly {
public:
    Poly() = default;
    Poly(Rat c) { if (c != 0) c_.push_back(std::move(c)); }
    Poly(std::vector<Rat> cs) : c_(std::move(cs)) { trim(); }
    static Poly n() { return Poly(std::vector<Rat>{0, 1}); }

    bool isZero() const { return c_.empty(); }
    int degree() const { return (int)c_.size() - 1; }  // -1 for zero
    const std::vector<Rat>& coeffs() const { return c_; }
    Rat coeff(int k) const { return k < (int)c_.size() ? c_[k] : Rat(0); }
    Rat lead() const { return c_.empty() ? Rat(0) : c_.back(); }

    Poly operator-() const;
    Poly operator+(const Poly&) const;
    Poly operator-(const Poly&) const;
    Poly operator*(const Poly&) const;
    bool operator==(const Poly& o) const { return c_ == o.c_; }

    // quotient/remainder; throws on division by zero
    static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r);
    static Poly gcd(Poly a, Poly b);  // monic gcd, 0 if both zero

    Poly monic() const;
    Rat eval(const Rat& x) const;
    std::string str() const;  // human/parser form, variable "n"

private:
    std::vector<Rat> c_;
    void trim() { while (!c_.empty() && c_.back() == 0) c_.pop_back(); }
};

// Reduced fraction of polynomials; denominator monic and nonzero.
class RatFn {
public:
    RatFn() : num_(), den_(Rat(1)) {}
    RatFn(Rat c) : num_(std::move(c)), den_(Rat(1)) {}
    RatFn(long c) : num_(Rat(c)), den_(Rat(1)) {}
    RatFn(Poly p) : num_(std::move(p)), den_(Rat(1)) {}
    RatFn(Poly nu, Poly de);
    static RatFn n() { return RatFn(Poly::n()); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool isZero() const { return num_.isZero(); }
    bool isConstant() const { return num_.degree() <= 0 && den_.degree() == 0; }

    RatFn operator-() const;
    RatFn operator+(const RatFn&) const;
    RatFn operator-(const RatFn&) const;
    RatFn operator*(const RatFn&) const;
    RatFn operator/(const RatFn&) const;
    bool operator==(const RatFn& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFn& o) const { return !(*this == o); }

    // substitute n = x; throws PoleAtLimit if denominator vanishes
    Rat eval(const Rat& x) const;
    // true if num is divisible by (n - root)^k (with nonzero result allowed)
    bool numDivisibleBy(const Rat& root, int k) const;
    std::string str() const;

private:
    Poly num_, den_;
    void reduce();
};

// Element of Q(n)(i).
struct Coeff {
    RatFn re, im;

    Coeff() = default;
    Coeff(RatFn r) : re(std::move(r)) {}
    Coeff(long r) : re(RatFn(r)) {}
    Coeff(RatFn r, RatFn i) : re(std::move(r)), im(std::move(i)) {}
    static Coeff i() { return Coeff(RatFn(0), RatFn(1)); }
    static Coeff n() { return Coeff(RatFn::n()); }

    bool isZero() const { return re.isZero() && im.isZero(); }
    Coeff conj() const { return Coeff(re, -im); }
    Coeff operator-() const { return Coeff(-re, -im); }
    Coeff operator+(const Coeff& o) const { return Coeff(re + o.re, im + o.im); }
    Coeff operator-(const Coeff& o) const { return Coeff(re - o.re, im - o.im); }
    Coeff operator*(const Coeff& o) const {
        return Coeff(re * o.re - im * o.im, re * o.im + im * o.re);
    }
    Coeff inverse() const;
    Coeff operator/(const Coeff& o) const { return *this * o.inverse(); }
    bool operator==(const Coeff& o) const { return re == o.re && im == o.im; }
    bool operator!=(const Coeff& o) const { return !(*this == o); }

    Coeff evalAt(const Rat& x) const { return Coeff(RatFn(re.eval(x)), RatFn(im.eval(x))); }
    std::string str() const;
};

}  // namespace cr
