#include <doctest.h>

#include <filesystem>

#include "hgm/gamma.hpp"
#include "hgm/gamma_cache.hpp"
#include "hgm/oracle.hpp"
#include "support.hpp"

using namespace hgm;
using hgm::testing::Gen;

namespace {

mpz_class direct_harmonic(int j, const Fraction& gamma, std::uint64_t p, int prec) {
    const mpz_class m = prime_power(p, prec);
    mpz_class acc = 0;
    for (std::uint64_t i = 1; i <= harmonic_cut(gamma, p); ++i) {
        mpz_class ij, inv;
        mpz_class base = static_cast<unsigned long>(i);
        mpz_pow_ui(ij.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(j));
        mpz_invert(inv.get_mpz_t(), ij.get_mpz_t(), m.get_mpz_t());
        acc += inv;
    }
    return acc % m;
}

// x0 in {1, ..., p} with x0 = x mod p
std::int64_t reflection_index(const Fraction& x, std::uint64_t p) {
    mpz_class r = reduce_fraction(x, mpz_class(static_cast<unsigned long>(p)));
    return r == 0 ? static_cast<std::int64_t>(p) : r.get_si();
}

ResidueElement signed_one(std::uint64_t p, int e, std::int64_t power) {
    return ResidueElement(p, e, power % 2 == 0 ? 1 : -1);
}

}  // namespace

TEST_CASE("factorial_batch examples") {
    CHECK(factorial_batch(Fraction(1), 2, std::vector<std::uint64_t>{5}).at(5).value() == 24);
    CHECK(factorial_batch(Fraction(1, 2), 1, std::vector<std::uint64_t>{7}).at(7).value() == 6);
    CHECK(factorial_batch(Fraction(1), 1, std::vector<std::uint64_t>{3}).at(3).value() == 2);
}

TEST_CASE("factorial_batch satisfies Wilson's theorem") {
    auto f = factorial_batch(Fraction(1), 1, 3000);
    CHECK(f.size() == primes_up_to(3000).size() - 1);
    for (const auto& [p, v] : f) CHECK(v.value() == p - 1);
}

TEST_CASE("factorial_batch on residue classes matches direct products") {
    Gen g(31);
    for (int it = 0; it < 20; ++it) {
        const std::int64_t d = g.range(2, 12);
        const Fraction gamma = g.unit_fraction(d);
        const int e = static_cast<int>(g.range(1, 3));
        PrimeFilter filter{static_cast<std::uint64_t>(d), g.urange(0, static_cast<std::uint64_t>(d) - 1)};
        for (const auto& [p, v] : factorial_batch(gamma, e, 400, &filter)) {
            CHECK(filter.accepts(p));
            mpz_class want = 1;
            for (std::uint64_t i = 2; i <= harmonic_cut(gamma, p); ++i) want *= static_cast<unsigned long>(i);
            CHECK(v.value() == want % prime_power(p, e));
        }
    }
}

TEST_CASE("harmonic_sums examples") {
    CHECK(harmonic_sums(1, Fraction(1), 3, std::vector<std::uint64_t>{5}).values.at(5).value() == 0);
    CHECK(harmonic_sums(2, Fraction(1), 3, std::vector<std::uint64_t>{5}).values.at(5).value() == 0);
    auto h = harmonic_sums(1, Fraction(1, 2), 2, std::vector<std::uint64_t>{5}).values.at(5);
    CHECK(h.value() == 4);
    CHECK(h.exponent() == 1);
}

TEST_CASE("harmonic_sums satisfy Wolstenholme's theorem") {
    auto t = harmonic_sums(1, Fraction(1), 3, 3000);
    for (const auto& [p, v] : t.values) {
        if (p < 5) continue;
        CHECK(v.exponent() == 2);
        CHECK(v.value() == 0);
    }
}

TEST_CASE("harmonic_sums agree with the direct sums") {
    Gen g(32);
    for (int it = 0; it < 30; ++it) {
        const int j = static_cast<int>(g.range(1, 3));
        const int e = j + static_cast<int>(g.range(1, 3));
        const Fraction gamma = g.coin() ? Fraction(1) : g.unit_fraction(g.range(2, 12));
        auto t = harmonic_sums(j, gamma, e, 300);
        CHECK(t.j == j);
        for (const auto& [p, v] : t.values) CHECK(v.value() == direct_harmonic(j, gamma, p, e - j));
    }
}

TEST_CASE("log_gamma_at_zero examples") {
    CHECK(log_gamma_at_zero(2, std::vector<std::uint64_t>{7}).at(7).w.at(0) == 14);
    CHECK(log_gamma_at_zero(2, std::vector<std::uint64_t>{5}).at(5).w.at(0) == 0);
    auto A = difference_operator_matrix(4);
    CHECK(A == std::vector<std::vector<std::int64_t>>{{1, 1, 1}, {0, 2, 3}, {0, 0, 3}});
    CHECK_THROWS(log_gamma_at_zero(3, std::vector<std::uint64_t>{3}));
    CHECK_THROWS(log_gamma_at_zero(1, std::vector<std::uint64_t>{7}));
}

TEST_CASE("log_gamma_at_zero reproduces Gamma_p at multiples of p") {
    for (int e = 2; e <= 5; ++e) {
        for (const auto& [p, lg] : log_gamma_at_zero(e, 200)) {
            CHECK(p > static_cast<std::uint64_t>(e));
            CHECK(lg.w.size() == static_cast<std::size_t>(e - 1));
            TruncatedSeries s = lg.series().exp();
            for (std::int64_t y : {1, -1, 2, 5}) {
                const auto x = static_cast<std::int64_t>(p) * y;
                CHECK(s.evaluate(mpz_class(static_cast<long>(x))) == gamma_p_direct(Fraction(x), p, e).value());
            }
        }
    }
}

TEST_CASE("gamma_expansion_tables examples") {
    GammaTable t2 = gamma_expansion_tables(2, 1, std::vector<std::uint64_t>{7});
    const GammaExpansion& half = t2.at({Fraction(1, 2), 7});
    CHECK(half.c.value() == 6);
    for (const auto& c : half.s.coeffs()) CHECK(c == 0);
    CHECK((half.c * half.c) == signed_one(7, 1, 4));

    // Gamma_7(3) = (-1)^3 2! = -2
    GammaTable t3 = gamma_expansion_tables(3, 1, std::vector<std::uint64_t>{7});
    CHECK(t3.at({Fraction(1, 3), 7}).c.value() == 4);
    CHECK(gamma_p_direct(Fraction(1, 3), 7, 1).value() == 4);
    CHECK_THROWS(gamma_expansion_tables(3, 1, std::vector<std::uint64_t>{3}));
}

TEST_CASE("eval_gamma examples") {
    GammaTable t1 = gamma_expansion_tables(2, 1, std::vector<std::uint64_t>{7});
    CHECK(eval_gamma(t1.at({Fraction(1, 2), 7}), ResidueElement(7, 1, 0)).value() == 6);
    GammaTable t2 = gamma_expansion_tables(2, 2, std::vector<std::uint64_t>{7});
    const GammaExpansion& ex = t2.at({Fraction(1, 2), 7});
    CHECK(eval_gamma(ex, ResidueElement(7, 2, 7)) == gamma_p_direct(Fraction(7) + Fraction(1, 2), 7, 2));
    CHECK(eval_gamma(ex, ResidueElement(7, 2, 0)) == ex.c);
    CHECK_THROWS(eval_gamma(ex, ResidueElement(7, 2, 1)));
}

TEST_CASE("every expansion matches the oracle at small integer offsets") {
    for (std::int64_t d : {3, 4, 5, 6}) {
        for (int e = 1; e <= 3; ++e) {
            for (const auto& [key, ex] : gamma_expansion_tables(d, e, 150)) {
                CHECK(ex.c.is_unit());
                CHECK(ex.s.coeff(0) == 0);
                const auto p = static_cast<std::int64_t>(ex.p);
                for (std::int64_t y : {0, 1, -1, 2}) {
                    ResidueElement t(ex.p, e, mpz_class(static_cast<long>(p * y)));
                    CHECK(eval_gamma(ex, t) == gamma_p_direct(Fraction(p * y) + ex.gamma, ex.p, e));
                }
            }
        }
    }
}

TEST_CASE("half-interval reflection gives the same tables") {
    for (std::int64_t d : {5, 8, 12}) {
        GammaOptions on, off;
        off.half_interval = false;
        GammaTable a = gamma_expansion_tables(d, 3, 300, on);
        GammaTable b = gamma_expansion_tables(d, 3, 300, off);
        REQUIRE(a.size() == b.size());
        for (const auto& [key, ex] : a) {
            const GammaExpansion& other = b.at(key);
            CHECK(ex.c == other.c);
            CHECK(ex.s == other.s);
        }
    }
}

TEST_CASE("functional equation, reflection and Lipschitz continuity") {
    Gen g(33);
    for (int it = 0; it < 300; ++it) {
        const std::int64_t d = g.pick(std::vector<std::int64_t>{3, 4, 5, 6, 8});
        const int e = static_cast<int>(g.range(1, 3));
        const std::uint64_t p = g.prime(static_cast<std::uint64_t>(std::max<std::int64_t>(d, e)) + 1, 300);
        if (d % static_cast<std::int64_t>(p) == 0) continue;
        const Fraction gamma = g.unit_fraction(d);
        GammaTable t = gamma_expansion_tables(d, e, std::vector<std::uint64_t>{p});
        const auto ps = static_cast<std::int64_t>(p);
        const std::int64_t y = g.range(0, 1);
        const Fraction x = Fraction(ps * y) + gamma;
        ResidueElement gx = eval_gamma(t.at({gamma, p}), ResidueElement(p, e, mpz_class(static_cast<long>(ps * y))));

        // Gamma_p(x + 1) = -x Gamma_p(x) for a unit x
        ResidueElement omega = -ResidueElement::from_fraction(x, p, e);
        CHECK(gamma_p_direct(x + Fraction(1), p, e) == omega * gx);

        // Gamma_p(x) Gamma_p(1 - x) = (-1)^{x0}
        ResidueElement gy = eval_gamma(t.at({Fraction(1) - gamma, p}),
                                       ResidueElement(p, e, mpz_class(static_cast<long>(-ps * y))));
        CHECK(gx * gy == signed_one(p, e, reflection_index(x, p)));

        // |Gamma_p(x) - Gamma_p(x')| <= |x - x'| for x = x' mod p^k
        const int k = static_cast<int>(g.range(1, e));
        const std::int64_t y2 = y + g.range(-3, 3) * static_cast<std::int64_t>(prime_power(p, k - 1).get_si());
        ResidueElement gx2 = eval_gamma(t.at({gamma, p}), ResidueElement(p, e, mpz_class(static_cast<long>(ps * y2))));
        CHECK((gx - gx2).reduce(k).value() == 0);
    }
}

TEST_CASE("GammaStore evaluates shifted arguments through the functional equation") {
    GammaStore store(3, 200);
    store.build({12});
    for (std::uint64_t p : {29ull, 101ull, 199ull}) {
        const auto ps = static_cast<std::int64_t>(p);
        for (const Fraction& A : {Fraction(-7, 12), Fraction(5, 4), Fraction(1, 6), Fraction(0), Fraction(1),
                                  Fraction(3, 2), Fraction(-1, 3)}) {
            TruncatedSeries s = store.series_at(A, p);
            for (std::int64_t y : {0, 1, -2}) {
                const mpz_class x = static_cast<long>(ps * y);
                CHECK(s.evaluate(x) == gamma_p_direct(A + Fraction(ps * y), p, 3).value());
            }
        }
        CHECK(store.has(Fraction(1, 4), p));
        CHECK(store.has(Fraction(1, 3), p));
        CHECK(store.expansion(Fraction(0), p).c.value() == 1);
    }
    CHECK_THROWS(store.expansion(Fraction(1, 5), 29));
}

TEST_CASE("gamma cache round trip and reuse") {
    const auto dir = std::filesystem::temp_directory_path() / "hgm-test-gamma-cache";
    std::filesystem::remove_all(dir);
    GammaCache cache(dir.string());

    GammaStore fresh(3, 300);
    fresh.build({5, 6}, {}, &cache);
    CHECK(fresh.loaded_from_cache() == 0);
    CHECK(std::filesystem::exists(cache.path(5, 3, 300, 1)));

    GammaStore again(3, 300);
    again.build({5, 6}, {}, &cache);
    CHECK(again.loaded_from_cache() > 0);
    for (std::uint64_t p : primes_up_to(300)) {
        if (p <= 5) continue;
        for (const Fraction& gamma : {Fraction(1, 5), Fraction(3, 5), Fraction(1, 6), Fraction(1, 2), Fraction(0)}) {
            CHECK(fresh.expansion(gamma, p).c == again.expansion(gamma, p).c);
            CHECK(fresh.expansion(gamma, p).s == again.expansion(gamma, p).s);
        }
    }

    auto list = cache.load(5, 3, 300, 1);
    REQUIRE(list.has_value());
    CHECK(!list->empty());
    CHECK_FALSE(cache.load(5, 3, 301, 1).has_value());

    // a damaged file is ignored and rebuilt
    {
        std::ofstream os(cache.path(5, 3, 300, 1), std::ios::binary | std::ios::trunc);
        os << "HGMGAMMAgarbage";
    }
    CHECK_FALSE(cache.load(5, 3, 300, 1).has_value());
    GammaStore rebuilt(3, 300);
    rebuilt.build({5}, {}, &cache);
    CHECK(rebuilt.expansion(Fraction(2, 5), 7).c == fresh.expansion(Fraction(2, 5), 7).c);
    CHECK(cache.load(5, 3, 300, 1).has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("default cache directory honours HGM_CACHE_DIR") {
    setenv("HGM_CACHE_DIR", "/tmp/hgm-env-cache", 1);
    CHECK(default_cache_dir() == "/tmp/hgm-env-cache");
    unsetenv("HGM_CACHE_DIR");
    CHECK(!default_cache_dir().empty());
}
