#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>

namespace parcalc {

using Int = boost::multiprecision::mpz_int;

// Exact rational scalar, always in lowest terms with positive denominator
// (zero is 0/1).  The GMP backend keeps arithmetic results canonical as long
// as the operands are, so normalization only happens where values enter from
// raw parts or text; boost's mpq_rational alone does not canonicalize those.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}
    Rational(long n) : v_(n) {}
    Rational(long long n) : v_(static_cast<Int>(n)) {}
    Rational(const Int& n) : v_(n) {}

    Rational(const Int& num, const Int& den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        Int n = num, d = den;
        if (d < 0) { n = -n; d = -d; }
        Int g = boost::multiprecision::gcd(n, d);
        if (g > 1) { n /= g; d /= g; }
        v_ = boost::multiprecision::mpq_rational(n, d);
    }

    // accepts "p" and "p/q" with optional sign on either part
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(Int(s));
            return Rational(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
        } catch (const std::runtime_error&) {
            throw std::invalid_argument("Rational: cannot parse '" + s + "'");
        }
    }

    // "p" when the value is integral, otherwise "p/q"
    std::string str() const { return v_.str(); }

    Int numerator() const { return Int(boost::multiprecision::numerator(v_)); }
    Int denominator() const { return Int(boost::multiprecision::denominator(v_)); }
    bool is_zero() const { return v_.is_zero(); }
    bool is_integer() const { return boost::multiprecision::denominator(v_) == 1; }
    int sign() const { return v_.sign(); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
    Rational operator-() const { Rational r; r.v_ = -v_; return r; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

private:
    boost::multiprecision::mpq_rational v_;
};

}  // namespace parcalc
