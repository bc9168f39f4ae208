#include "hgm/fraction.hpp"

#include <numeric>
#include <stdexcept>

namespace hgm {

namespace {

std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("fraction overflow");
    return static_cast<std::int64_t>(v);
}

Fraction make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    return Fraction(narrow(n), narrow(d));
}

}  // namespace

Fraction::Fraction(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("zero denominator");
    if (d < 0) {
        if (n == INT64_MIN || d == INT64_MIN) throw std::overflow_error("fraction overflow");
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n, d);
    if (g > 1) { n /= g; d /= g; }
    num_ = n;
    den_ = d;
}

Fraction Fraction::operator+(const Fraction& o) const {
    return make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                static_cast<__int128>(den_) * o.den_);
}

Fraction Fraction::operator-(const Fraction& o) const {
    return make(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                static_cast<__int128>(den_) * o.den_);
}

Fraction Fraction::operator*(const Fraction& o) const {
    return make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

Fraction Fraction::operator/(const Fraction& o) const {
    if (o.num_ == 0) throw std::domain_error("division by zero fraction");
    return make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

Fraction Fraction::operator-() const { return make(-static_cast<__int128>(num_), den_); }

std::strong_ordering Fraction::operator<=>(const Fraction& o) const {
    __int128 l = static_cast<__int128>(num_) * o.den_;
    __int128 r = static_cast<__int128>(o.num_) * den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::int64_t Fraction::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Fraction Fraction::frac() const { return *this - Fraction(floor()); }

std::string Fraction::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Fraction Fraction::parse(std::string_view s) {
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    };
    auto parse_int = [&](std::string_view v) -> std::int64_t {
        v = trim(v);
        if (v.empty()) throw std::invalid_argument("empty integer in fraction");
        std::size_t i = 0;
        bool neg = false;
        if (v[0] == '+' || v[0] == '-') { neg = v[0] == '-'; i = 1; }
        if (i == v.size()) throw std::invalid_argument("bad integer in fraction");
        __int128 acc = 0;
        for (; i < v.size(); ++i) {
            if (v[i] < '0' || v[i] > '9') throw std::invalid_argument("bad digit in fraction: " + std::string(v));
            acc = acc * 10 + (v[i] - '0');
            if (acc > INT64_MAX) throw std::overflow_error("fraction component too large");
        }
        return static_cast<std::int64_t>(neg ? -acc : acc);
    };
    s = trim(s);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Fraction(parse_int(s));
    std::int64_t d = parse_int(s.substr(slash + 1));
    if (d <= 0) throw std::invalid_argument("fraction denominator must be positive");
    return Fraction(parse_int(s.substr(0, slash)), d);
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return narrow(static_cast<__int128>(a / std::gcd(a, b)) * b);
}

}  // namespace hgm
