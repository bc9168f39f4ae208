#include "hgm/oracle.hpp"

#include <vector>

#include "hgm/padic.hpp"

namespace hgm {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 n, u64 m) {
    u64 r = 1 % m;
    while (n) {
        if (n & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        n >>= 1;
    }
    return r;
}

// inverse of a unit mod m = p^e via Euler: a^(phi(m) - 1)
u64 invmod(u64 a, u64 p, u64 m) { return powmod(a, m / p * (p - 1) - 1, m); }

u64 checked_power(u64 p, int e) {
    u128 m = 1;
    for (int i = 0; i < e; ++i) {
        m *= p;
        if (m >= (u128(1) << 62)) throw OracleBoundExceeded("p^e does not fit the oracle's word arithmetic");
    }
    return static_cast<u64>(m);
}

// x mod m as an integer in [1, m]
u64 representative(const Fraction& x, u64 p, u64 m) {
    auto sp = static_cast<std::int64_t>(p);
    if (x.den() % sp == 0) throw std::invalid_argument("denominator divisible by p: " + x.str());
    std::int64_t n = x.num() % static_cast<std::int64_t>(m);
    u64 num = static_cast<u64>(n < 0 ? n + static_cast<std::int64_t>(m) : n);
    u64 den = static_cast<u64>(x.den()) % m;
    u64 v = mulmod(num, invmod(den, p, m), m);
    return v == 0 ? m : v;
}

struct FactorialTable {
    u64 p = 0, m = 0;
    int e = 0;
    std::vector<u64> f;  // f[n] = prod_{i <= n, p does not divide i} i mod m
};

const FactorialTable& factorial_table(u64 p, int e, u64 m, bool memoize) {
    thread_local FactorialTable cache;
    thread_local FactorialTable scratch;
    FactorialTable& t = memoize ? cache : scratch;
    if (t.p == p && t.e == e && !t.f.empty()) return t;
    t.p = p;
    t.e = e;
    t.m = m;
    u64 n = static_cast<u64>(e) * p + 1;
    t.f.assign(n + 1, 1);
    for (u64 i = 1; i <= n; ++i) t.f[i] = i % p == 0 ? t.f[i - 1] : mulmod(t.f[i - 1], i % m, m);
    return t;
}

u64 gamma_loop(u64 N, u64 p, u64 m) {
    u64 acc = 1 % m;
    for (u64 i = 1; i < N; ++i)
        if (i % p != 0) acc = mulmod(acc, i, m);
    return N % 2 == 0 ? acc : (m - acc) % m;
}

u64 gamma_interpolated(u64 N, u64 p, int e, u64 m, bool memoize) {
    const FactorialTable& t = factorial_table(p, e, m, memoize);
    u64 a = (N - 1) % p + 1;
    u64 tt = (N - a) / p;
    auto gamma_int = [&](u64 n) {  // n >= 1
        u64 v = t.f[n - 1];
        return n % 2 == 0 ? v : (m - v) % m;
    };
    u64 acc = 0;
    for (int j = 0; j < e; ++j) {
        u64 num = 1 % m, den = 1 % m;
        for (int k = 0; k < e; ++k) {
            if (k == j) continue;
            num = mulmod(num, (tt % m + m - static_cast<u64>(k)) % m, m);
            std::int64_t diff = j - k;
            den = mulmod(den, diff < 0 ? m - static_cast<u64>(-diff) : static_cast<u64>(diff), m);
        }
        u64 term = mulmod(gamma_int(a + p * static_cast<u64>(j)), mulmod(num, invmod(den, p, m), m), m);
        acc = (acc + term) % m;
    }
    return acc;
}

u64 gamma_word(const Fraction& x, u64 p, int e, u64 m, const OracleConfig& cfg) {
    u64 N = representative(x, p, m);
    if (cfg.interpolate && p > static_cast<u64>(e)) return gamma_interpolated(N, p, e, m, cfg.memoize);
    if (m > cfg.max_modulus) throw OracleBoundExceeded("p^e exceeds the oracle bound");
    return gamma_loop(N, p, m);
}

void check_prime(u64 p) {
    if (p == 2) throw std::invalid_argument("p = 2 is not supported");
    if (p < 3 || p % 2 == 0) throw std::invalid_argument("oracle needs an odd prime");
}

}  // namespace

ResidueElement gamma_p_product(const Fraction& x, std::uint64_t p, int e, const OracleConfig& cfg) {
    check_prime(p);
    u64 m = checked_power(p, e);
    if (m > cfg.max_modulus) throw OracleBoundExceeded("p^e exceeds the oracle bound");
    return ResidueElement(p, e, mpz_class(static_cast<unsigned long>(gamma_loop(representative(x, p, m), p, m))));
}

ResidueElement gamma_p_direct(const Fraction& x, std::uint64_t p, int e, const OracleConfig& cfg) {
    check_prime(p);
    u64 m = checked_power(p, e);
    return ResidueElement(p, e, mpz_class(static_cast<unsigned long>(gamma_word(x, p, e, m, cfg))));
}

ResidueElement pochhammer_star(const Fraction& gamma, std::uint64_t m, std::uint64_t p, int e,
                               const OracleConfig& cfg) {
    check_prime(p);
    u64 mod = checked_power(p, e);
    Fraction shifted = (gamma + Fraction(static_cast<std::int64_t>(m), 1 - static_cast<std::int64_t>(p))).frac();
    u64 num = gamma_word(shifted, p, e, mod, cfg);
    u64 den = gamma_word(gamma.frac(), p, e, mod, cfg);
    return ResidueElement(p, e, mpz_class(static_cast<unsigned long>(mulmod(num, invmod(den, p, mod), mod))));
}

ResidueElement H_p_direct(const HypergeometricDatum& datum, const Fraction& z, std::uint64_t p, int e,
                          const OracleConfig& cfg) {
    check_prime(p);
    if (is_wild(datum, p) || is_tame(z, p)) throw std::invalid_argument("H_p_direct needs a good prime");
    const u64 mod = checked_power(p, e);
    const u64 zl = static_cast<u64>(teichmuller_lift(z, p, e).value().get_ui());

    u64 base = 1 % mod;
    for (const auto& a : datum.alpha()) base = mulmod(base, gamma_word(a, p, e, mod, cfg), mod);
    u64 base_beta = 1 % mod;
    for (const auto& b : datum.beta()) base_beta = mulmod(base_beta, gamma_word(b, p, e, mod, cfg), mod);
    // prod over beta / prod over alpha of Gamma_p({gamma}), applied to every term
    const u64 base_ratio = mulmod(base_beta, invmod(base, p, mod), mod);

    u64 sum = 0;
    u64 zpow = 1 % mod;
    for (u64 m = 0; m + 2 <= p; ++m) {
        if (m > 0) zpow = mulmod(zpow, zl, mod);
        auto [delta, xi] = eta_xi_direct(datum, p, m);
        std::int64_t E = delta + datum.D() + xi;
        if (E < 0) throw std::logic_error("negative p-exponent in trace formula");
        if (E >= e) continue;
        Fraction t(static_cast<std::int64_t>(m), 1 - static_cast<std::int64_t>(p));
        u64 num = 1 % mod, den = 1 % mod;
        for (const auto& a : datum.alpha()) num = mulmod(num, gamma_word((a + t).frac(), p, e, mod, cfg), mod);
        for (const auto& b : datum.beta()) den = mulmod(den, gamma_word((b + t).frac(), p, e, mod, cfg), mod);
        u64 term = mulmod(mulmod(num, invmod(den, p, mod), mod), base_ratio, mod);
        term = mulmod(term, zpow, mod);
        term = mulmod(term, powmod(p, static_cast<u64>(E), mod), mod);
        if (delta % 2 != 0) term = (mod - term) % mod;
        sum = (sum + term) % mod;
    }
    u64 one_minus_p = (1 + mod - p % mod) % mod;
    return ResidueElement(p, e, mpz_class(static_cast<unsigned long>(mulmod(sum, invmod(one_minus_p, p, mod), mod))));
}

}  // namespace hgm
