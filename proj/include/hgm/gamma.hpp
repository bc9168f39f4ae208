#pragma once

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "hgm/forest.hpp"
#include "hgm/fraction.hpp"
#include "hgm/primes.hpp"
#include "hgm/residue.hpp"
#include "hgm/series.hpp"

namespace hgm {

// Primes p with e < p <= X, p odd, p not dividing d.
std::vector<std::uint64_t> gamma_primes(std::int64_t d, int e, std::uint64_t X,
                                        const PrimeFilter* filter = nullptr);

// ceil(gamma p) - 1
std::uint64_t harmonic_cut(const Fraction& gamma, std::uint64_t p);

// (ceil(gamma p) - 1)! mod p^e
std::map<std::uint64_t, ResidueElement> factorial_batch(const Fraction& gamma, int e,
                                                        const std::vector<std::uint64_t>& primes,
                                                        const ForestOptions& opts = {});
std::map<std::uint64_t, ResidueElement> factorial_batch(const Fraction& gamma, int e, std::uint64_t X,
                                                        const PrimeFilter* filter = nullptr,
                                                        const ForestOptions& opts = {});

struct HarmonicTable {
    int j = 1;
    Fraction gamma;
    std::map<std::uint64_t, ResidueElement> values;  // H_{j,gamma}(p) mod p^{e-j}
};

HarmonicTable harmonic_sums(int j, const Fraction& gamma, int e, const std::vector<std::uint64_t>& primes,
                            const ForestOptions& opts = {});
HarmonicTable harmonic_sums(int j, const Fraction& gamma, int e, std::uint64_t X,
                            const PrimeFilter* filter = nullptr, const ForestOptions& opts = {});

// One forest pass for sum_{i <= ceil(gamma p) - 1} i^{-j} mod p^{exponent}; with j = 1
// the product row also yields the factorial.
struct HarmonicRun {
    std::vector<mpz_class> sums;
    std::vector<mpz_class> products;
};
HarmonicRun run_harmonic_job(int j, const Fraction& gamma, int exponent, const std::vector<std::uint64_t>& primes,
                             const ForestOptions& opts = {});

// log Gamma_p(p y) = sum_{j=1}^{e-1} w_j y^j mod p^e
struct LogGammaAtZero {
    std::uint64_t p = 0;
    int e = 0;
    std::vector<mpz_class> w;  // w[0] = w_1
    // same expansion in x = p y, graded
    TruncatedSeries series() const;
};

// (e-1) x (e-1), A_ij = binom(j, i-1) for i <= j
std::vector<std::vector<std::int64_t>> difference_operator_matrix(int e);

std::map<std::uint64_t, LogGammaAtZero> log_gamma_at_zero(int e, const std::vector<std::uint64_t>& primes,
                                                          const ForestOptions& opts = {});
std::map<std::uint64_t, LogGammaAtZero> log_gamma_at_zero(int e, std::uint64_t X, const ForestOptions& opts = {});

// Gamma_p(x + gamma) = c exp s(x) for x in pZ_p; s(0) = 0, s graded in x.
struct GammaExpansion {
    Fraction gamma;
    std::uint64_t p = 0;
    ResidueElement c;
    TruncatedSeries s;
};

struct GammaOptions {
    // compute gamma <= 1/2 and reflect the rest
    bool half_interval = true;
    ForestOptions forest;
};

using GammaTable = std::map<std::pair<Fraction, std::uint64_t>, GammaExpansion>;

// All gamma = a/d in (0,1) with gcd(a, d) = 1. A non-empty log0 is reused instead of
// recomputing the expansion at 0.
GammaTable gamma_expansion_tables(std::int64_t d, int e, const std::vector<std::uint64_t>& primes,
                                  const GammaOptions& opts = {},
                                  const std::map<std::uint64_t, LogGammaAtZero>* log0 = nullptr);
GammaTable gamma_expansion_tables(std::int64_t d, int e, std::uint64_t X, const GammaOptions& opts = {});

// Gamma_p(t + gamma) mod p^e, t = 0 mod p
ResidueElement eval_gamma(const GammaExpansion& ex, const ResidueElement& t);

class GammaCache;

// Expansions for a set of denominators and all primes in (e, X].
class GammaStore {
public:
    GammaStore() = default;
    GammaStore(int e, std::uint64_t X) : e_(e), X_(X) {}

    // Loads from the cache where possible, computes and stores the rest.
    void build(const std::vector<std::int64_t>& denominators, const GammaOptions& opts = {},
               GammaCache* cache = nullptr);

    int exponent() const { return e_; }
    std::uint64_t limit() const { return X_; }
    bool has(const Fraction& gamma, std::uint64_t p) const;
    // gamma in [0, 1); gamma = 0 gives c = 1 and the expansion of log Gamma_p at 0
    const GammaExpansion& expansion(const Fraction& gamma, std::uint64_t p) const;
    // Gamma_p(A + x) as a graded series in x
    TruncatedSeries series_at(const Fraction& A, std::uint64_t p) const;
    ResidueElement value_at(const Fraction& A, std::uint64_t p) const;

    std::size_t loaded_from_cache() const { return cache_hits_; }

private:
    int e_ = 1;
    std::uint64_t X_ = 0;
    std::size_t cache_hits_ = 0;
    std::map<std::tuple<std::int64_t, std::int64_t, std::uint64_t>, GammaExpansion> table_;
};

}  // namespace hgm
