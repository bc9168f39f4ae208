#include "hgm/padic.hpp"

#include <stdexcept>

namespace hgm {

namespace {

int floor_log(std::uint64_t n, std::uint64_t p) {
    int k = 0;
    while (n >= p) { n /= p; ++k; }
    return k;
}

int vp(std::uint64_t n, std::uint64_t p) {
    int k = 0;
    while (n % p == 0) { n /= p; ++k; }
    return k;
}

}  // namespace

ResidueElement padic_log(const ResidueElement& u) {
    const std::uint64_t p = u.prime();
    const int e = u.exponent();
    mpz_class x = u.value() - 1;
    if (!mpz_divisible_ui_p(x.get_mpz_t(), p)) throw std::invalid_argument("padic_log needs u = 1 mod p");
    std::uint64_t last = 0;
    int guard = 0;
    for (std::uint64_t n = 1; n < static_cast<std::uint64_t>(e) + 64; ++n) {
        if (static_cast<int>(n) - floor_log(n, p) < e) {
            last = n;
            guard = std::max(guard, vp(n, p));
        }
    }
    const mpz_class& m = u.modulus();
    mpz_class wide = prime_power(p, e + guard);
    mpz_class acc = 0;
    mpz_class power = 1;
    for (std::uint64_t n = 1; n <= last; ++n) {
        power = power * x % wide;
        if (static_cast<int>(n) - floor_log(n, p) >= e) continue;
        int v = vp(n, p);
        mpz_class term = power;
        mpz_class unit = static_cast<unsigned long>(n);
        if (v > 0) {
            mpz_class pv = prime_power(p, v);
            mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), pv.get_mpz_t());
            mpz_divexact(unit.get_mpz_t(), unit.get_mpz_t(), pv.get_mpz_t());
        }
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), m.get_mpz_t());
        term = term * inv;
        if (n % 2 == 0) acc -= term; else acc += term;
        mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
    }
    return ResidueElement(p, e, acc);
}

ResidueElement padic_exp(const ResidueElement& x) {
    const std::uint64_t p = x.prime();
    const int e = x.exponent();
    if (p <= static_cast<std::uint64_t>(e)) throw std::invalid_argument("padic_exp needs p > e");
    if (!mpz_divisible_ui_p(x.value().get_mpz_t(), p)) throw std::invalid_argument("padic_exp needs x = 0 mod p");
    const mpz_class& m = x.modulus();
    mpz_class acc = 1;
    mpz_class term = 1;
    for (std::uint64_t n = 1; static_cast<double>(n) - static_cast<double>(n - 1) / static_cast<double>(p - 1) < e; ++n) {
        term = term * x.value() % m;
        mpz_class inv;
        mpz_class nn = static_cast<unsigned long>(n);
        mpz_invert(inv.get_mpz_t(), nn.get_mpz_t(), m.get_mpz_t());
        term = term * inv % m;
        acc += term;
    }
    return ResidueElement(p, e, acc);
}

ResidueElement teichmuller_lift(const Fraction& z, std::uint64_t p, int e) {
    if (p == 2) throw std::invalid_argument("p = 2 is not supported");
    if (z.num() % static_cast<std::int64_t>(p) == 0 || z.den() % static_cast<std::int64_t>(p) == 0)
        throw std::invalid_argument("teichmuller_lift needs z to be a p-adic unit");
    ResidueElement x = ResidueElement::from_fraction(z, p, e);
    mpz_class pp = static_cast<unsigned long>(p);
    for (int i = 1; i < e; ++i) x = x.pow(pp);
    return x;
}

}  // namespace hgm
