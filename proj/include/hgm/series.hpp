#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "hgm/fraction.hpp"
#include "hgm/residue.hpp"

namespace hgm {

// Uniform: every coefficient mod p^e.
// Graded: coefficient h mod p^{e-h}, at most e coefficients. The variable is
// meant to be substituted by multiples of p, so this is exact mod p^e.
enum class Schedule { Uniform, Graded };

class TruncatedSeries {
public:
    TruncatedSeries() = default;
    TruncatedSeries(std::uint64_t p, int e, Schedule s, std::vector<mpz_class> coeffs);

    static TruncatedSeries constant(std::uint64_t p, int e, Schedule s, const mpz_class& c);
    // c0 + c1 * x
    static TruncatedSeries linear(std::uint64_t p, int e, Schedule s, const mpz_class& c0,
                                  const mpz_class& c1);

    std::uint64_t prime() const { return p_; }
    int exponent() const { return e_; }
    Schedule schedule() const { return sched_; }
    std::size_t size() const { return c_.size(); }
    const mpz_class& coeff(std::size_t h) const { return c_[h]; }
    const std::vector<mpz_class>& coeffs() const { return c_; }
    // Number of p-adic digits carried by coefficient h.
    int precision(std::size_t h) const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries operator-() const;
    TruncatedSeries scale(const mpz_class& k) const;

    mpz_class evaluate(const mpz_class& x) const;
    // exp of a series with zero constant term; graded schedule, p > e.
    TruncatedSeries exp() const;
    // Multiplicative inverse; constant term must be a unit.
    TruncatedSeries inverse() const;
    // s(x + offset)
    TruncatedSeries compose_shift(const Fraction& offset) const;
    // s(-x)
    TruncatedSeries negate_variable() const;
    TruncatedSeries reduce(int e2) const;

    bool operator==(const TruncatedSeries& o) const;

private:
    void normalize();
    void check(const TruncatedSeries& o) const;
    const mpz_class& mod(std::size_t h) const { return mods_[sched_ == Schedule::Graded ? h : 0]; }

    std::uint64_t p_ = 0;
    int e_ = 0;
    Schedule sched_ = Schedule::Uniform;
    std::vector<mpz_class> c_;
    std::vector<mpz_class> mods_;
};

TruncatedSeries series_compose_shift(const TruncatedSeries& s, const Fraction& offset);

}  // namespace hgm
