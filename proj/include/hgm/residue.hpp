#pragma once

#include <cstdint>
#include <gmpxx.h>

#include "hgm/fraction.hpp"

namespace hgm {

mpz_class prime_power(std::uint64_t p, int e);

// p-adic valuation of a nonzero integer; returns -1 for zero.
int valuation(const mpz_class& v, std::uint64_t p);

// Reduction of x mod m into [0, m); x's denominator must be invertible mod m.
mpz_class reduce_fraction(const Fraction& x, const mpz_class& m);

// Integer residue modulo p^e.
class ResidueElement {
public:
    ResidueElement() = default;
    ResidueElement(std::uint64_t p, int e, const mpz_class& v);
    static ResidueElement from_fraction(const Fraction& x, std::uint64_t p, int e);

    std::uint64_t prime() const { return p_; }
    int exponent() const { return e_; }
    const mpz_class& value() const { return v_; }
    const mpz_class& modulus() const { return m_; }

    ResidueElement operator+(const ResidueElement& o) const;
    ResidueElement operator-(const ResidueElement& o) const;
    ResidueElement operator*(const ResidueElement& o) const;
    ResidueElement operator-() const;
    ResidueElement inverse() const;
    ResidueElement pow(const mpz_class& n) const;
    ResidueElement reduce(int e2) const;

    bool is_unit() const;
    // p-adic valuation of the value (e when the residue is zero).
    int valuation() const;

    bool operator==(const ResidueElement& o) const {
        return p_ == o.p_ && e_ == o.e_ && v_ == o.v_;
    }

private:
    void check(const ResidueElement& o) const;

    std::uint64_t p_ = 0;
    int e_ = 0;
    mpz_class m_;
    mpz_class v_;
};

}  // namespace hgm
