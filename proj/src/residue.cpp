#include "hgm/residue.hpp"

#include <stdexcept>

namespace hgm {

mpz_class prime_power(std::uint64_t p, int e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(e));
    return r;
}

int valuation(const mpz_class& v, std::uint64_t p) {
    if (v == 0) return -1;
    mpz_class t = v;
    int k = 0;
    while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
        ++k;
    }
    return k;
}

mpz_class reduce_fraction(const Fraction& x, const mpz_class& m) {
    mpz_class n(static_cast<long>(x.num()));
    mpz_class d(static_cast<long>(x.den()));
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t()) == 0) {
        if (m == 1) return 0;
        throw std::invalid_argument("denominator not invertible: " + x.str());
    }
    mpz_class r = n * inv;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
    return r;
}

ResidueElement::ResidueElement(std::uint64_t p, int e, const mpz_class& v) : p_(p), e_(e) {
    if (p == 2) throw std::invalid_argument("p = 2 is not supported");
    if (p < 3) throw std::invalid_argument("modulus prime must be odd");
    if (e < 1) throw std::invalid_argument("exponent must be >= 1");
    m_ = prime_power(p, e);
    mpz_mod(v_.get_mpz_t(), v.get_mpz_t(), m_.get_mpz_t());
}

ResidueElement ResidueElement::from_fraction(const Fraction& x, std::uint64_t p, int e) {
    mpz_class m = prime_power(p, e);
    return ResidueElement(p, e, reduce_fraction(x, m));
}

void ResidueElement::check(const ResidueElement& o) const {
    if (p_ != o.p_ || e_ != o.e_) throw std::invalid_argument("residue moduli differ");
}

ResidueElement ResidueElement::operator+(const ResidueElement& o) const {
    check(o);
    return ResidueElement(p_, e_, v_ + o.v_);
}

ResidueElement ResidueElement::operator-(const ResidueElement& o) const {
    check(o);
    return ResidueElement(p_, e_, v_ - o.v_);
}

ResidueElement ResidueElement::operator*(const ResidueElement& o) const {
    check(o);
    return ResidueElement(p_, e_, v_ * o.v_);
}

ResidueElement ResidueElement::operator-() const { return ResidueElement(p_, e_, -v_); }

ResidueElement ResidueElement::inverse() const {
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), v_.get_mpz_t(), m_.get_mpz_t()) == 0)
        throw std::domain_error("residue is not a unit");
    return ResidueElement(p_, e_, inv);
}

ResidueElement ResidueElement::pow(const mpz_class& n) const {
    mpz_class r;
    if (n < 0) return inverse().pow(-n);
    mpz_powm(r.get_mpz_t(), v_.get_mpz_t(), n.get_mpz_t(), m_.get_mpz_t());
    return ResidueElement(p_, e_, r);
}

ResidueElement ResidueElement::reduce(int e2) const {
    if (e2 > e_) throw std::invalid_argument("cannot raise residue precision");
    return ResidueElement(p_, e2, v_);
}

bool ResidueElement::is_unit() const { return !mpz_divisible_ui_p(v_.get_mpz_t(), p_); }

int ResidueElement::valuation() const {
    if (v_ == 0) return e_;
    return hgm::valuation(v_, p_);
}

}  // namespace hgm
