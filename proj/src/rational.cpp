#include "sipkit/rational.hpp"

#include <algorithm>
#include <ostream>

namespace sipkit {

namespace {

using Int = Rational::Int;

Int abs128(Int x) { return x < 0 ? -x : x; }

Int gcd128(Int a, Int b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string to_string128(Int x) {
    if (x == 0) return "0";
    bool neg = x < 0;
    std::string s;
    // Work on the negative side so the minimum value does not overflow.
    if (!neg) x = -x;
    while (x != 0) {
        int digit = -static_cast<int>(x % 10);
        s.push_back(static_cast<char>('0' + digit));
        x /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace

Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
}

Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
}

Rational::Rational(Int n, Int d) {
    if (d == 0) throw std::domain_error("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    Int g = gcd128(n, d);
    num_ = n / g;
    den_ = d / g;
}

std::int64_t Rational::floor() const {
    Int q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return static_cast<std::int64_t>(q);
}

std::int64_t Rational::round_half_up() const { return (*this + Rational(1, 2)).floor(); }

double Rational::to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

Rational& Rational::operator+=(const Rational& o) {
    Int g = gcd128(den_, o.den_);
    Int lhs = checked_mul(num_, o.den_ / g);
    Int rhs = checked_mul(o.num_, den_ / g);
    *this = Rational(checked_add(lhs, rhs), checked_mul(den_ / g, o.den_));
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    Int g1 = gcd128(num_, o.den_);
    Int g2 = gcd128(o.num_, den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    *this = Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("division by zero");
    return *this *= Rational(o.den_, o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    Int lhs = checked_mul(a.num_, b.den_);
    Int rhs = checked_mul(b.num_, a.den_);
    return lhs <=> rhs;
}

std::string Rational::str() const {
    if (den_ == 1) return to_string128(num_);
    return to_string128(num_) + "/" + to_string128(den_);
}

Rational Rational::parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto parse_int = [](const std::string& t) -> Int {
        if (t.empty()) throw std::invalid_argument("bad rational");
        std::size_t i = 0;
        bool neg = false;
        if (t[0] == '-' || t[0] == '+') {
            neg = t[0] == '-';
            i = 1;
        }
        if (i == t.size()) throw std::invalid_argument("bad rational");
        Int v = 0;
        for (; i < t.size(); ++i) {
            if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("bad rational: " + t);
            v = checked_add(checked_mul(v, 10), t[i] - '0');
        }
        return neg ? -v : v;
    };
    if (auto slash = s.find('/'); slash != std::string::npos) {
        return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string frac = s.substr(dot + 1);
        Int den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den = checked_mul(den, 10);
        std::string whole = s.substr(0, dot);
        bool neg = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-" || whole == "+") whole += "0";
        Int w = parse_int(whole);
        Int f = frac.empty() ? 0 : parse_int(frac);
        Int n = checked_add(checked_mul(neg ? -w : w, den), f);
        return Rational(neg ? -n : n, den);
    }
    return Rational(parse_int(s), 1);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace sipkit
