// Shared fixtures for the unit and acceptance tests: seeded generators and the
// five reference data.
#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hgm/datum.hpp"
#include "hgm/fraction.hpp"
#include "hgm/matrix.hpp"
#include "hgm/oracle.hpp"
#include "hgm/padic.hpp"
#include "hgm/primes.hpp"
#include "hgm/residue.hpp"

namespace hgm::testing {

inline const std::vector<std::string>& reference_data() {
    static const std::vector<std::string> data = {
        "1/4,3/4;1/6,5/6",
        "1/10,3/10,7/10,9/10;1/6,1/6,5/6,5/6",
        "1/4,1/3,2/3,3/4;1/6,1/6,5/6,5/6",
        "1/5,2/5,1/2,1/2,3/5,4/5;1/6,1/6,1/6,5/6,5/6,5/6",
        "1/5,1/3,2/5,1/2,1/2,3/5,2/3,4/5;1/6,1/6,1/6,1/6,5/6,5/6,5/6,5/6",
    };
    return data;
}

inline const Fraction kReferenceZ(314, 159);

// Seeded generator; every test owns one so failures replay.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    std::uint64_t urange(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
    }
    bool coin() { return range(0, 1) == 1; }

    // odd prime in [lo, hi]
    std::uint64_t prime(std::uint64_t lo, std::uint64_t hi) {
        for (;;) {
            std::uint64_t p = urange(lo, hi);
            if (p > 2 && is_prime(p)) return p;
        }
    }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(range(0, static_cast<std::int64_t>(v.size()) - 1))];
    }
    // a/d with 0 < a < d, gcd(a, d) = 1
    Fraction unit_fraction(std::int64_t d) {
        for (;;) {
            std::int64_t a = range(1, d - 1);
            if (std::gcd(a, d) == 1) return Fraction(a, d);
        }
    }
    // nonzero rational with numerator and denominator prime to p, |num|, den <= bound
    Fraction p_unit(std::uint64_t p, std::int64_t bound) {
        const auto ps = static_cast<std::int64_t>(p);
        for (;;) {
            std::int64_t n = range(-bound, bound), d = range(1, bound);
            if (n == 0 || n % ps == 0 || d % ps == 0) continue;
            return Fraction(n, d);
        }
    }
    mpz_class below(const mpz_class& m) {
        mpz_class v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 32) + static_cast<unsigned long>(urange(0, 0xffffffffu));
        return v % m;
    }
    IntegerMatrix matrix(std::size_t rows, std::size_t cols, std::int64_t bound) {
        IntegerMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<long>(range(-bound, bound));
        return m;
    }

private:
    std::mt19937_64 rng_;
};

// P_m = [z]^m prod_alpha (alpha)*_m / prod_beta (beta)*_m, without the p-power prefactor
inline ResidueElement oracle_Pm(const HypergeometricDatum& datum, const Fraction& z, std::uint64_t m, std::uint64_t p,
                                int e) {
    ResidueElement v = teichmuller_lift(z, p, e).pow(mpz_class(static_cast<unsigned long>(m)));
    for (const auto& a : datum.alpha()) v = v * pochhammer_star(a, m, p, e);
    for (const auto& b : datum.beta()) v = v * pochhammer_star(b, m, p, e).inverse();
    return v;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

}  // namespace hgm::testing
