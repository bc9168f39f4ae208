#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hgm {

// Exact rational in lowest terms, denominator > 0. Overflow throws.
class Fraction {
public:
    Fraction() = default;
    Fraction(std::int64_t n) : num_(n), den_(1) {}
    Fraction(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Fraction operator+(const Fraction& o) const;
    Fraction operator-(const Fraction& o) const;
    Fraction operator*(const Fraction& o) const;
    Fraction operator/(const Fraction& o) const;
    Fraction operator-() const;

    bool operator==(const Fraction& o) const { return num_ == o.num_ && den_ == o.den_; }
    std::strong_ordering operator<=>(const Fraction& o) const;

    std::int64_t floor() const;
    Fraction frac() const;  // x - floor(x), in [0,1)
    bool is_integer() const { return den_ == 1; }

    std::string str() const;
    static Fraction parse(std::string_view s);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::int64_t lcm64(std::int64_t a, std::int64_t b);

}  // namespace hgm
