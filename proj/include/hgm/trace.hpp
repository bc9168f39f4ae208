#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "hgm/datum.hpp"
#include "hgm/forest.hpp"
#include "hgm/fraction.hpp"
#include "hgm/gamma.hpp"
#include "hgm/residue.hpp"
#include "hgm/series.hpp"

namespace hgm {

class GammaCache;

class DenominatorCollision : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AmbiguousLift : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The datum and z the trace formula is applied to: (beta, alpha | 1/z) when 0 is in alpha.
std::pair<HypergeometricDatum, Fraction> formula_input(const HypergeometricDatum& datum, const Fraction& z);

// [z]^m mod p^e as z^m exp(m/(1-p) log z^{p-1})
ResidueElement teichmuller_power(const Fraction& z, std::uint64_t m, std::uint64_t p, int e);

// Denominators of every Gamma_p argument the amortized path evaluates.
std::vector<std::int64_t> needed_denominators(const HypergeometricDatum& datum);

// P_{m_i} mod p^prec
ResidueElement compute_Pmi(const HypergeometricDatum& datum, const Fraction& z, int i, std::uint64_t p,
                           const GammaStore& store, int prec);

// c_{i,0..prec-1}(p) as a graded series in t = (k - gamma_{i,c}) p/(1-p):
// P_{m_i+k} = C(t_k) prod_{j<k} z f(t_k+j)/g(t_k+j) mod p^prec.
TruncatedSeries compute_cih(const HypergeometricDatum& datum, const Fraction& z, int i, std::uint64_t p,
                            const GammaStore& store, int prec);

struct RangeJob {
    int i = 0;
    std::int64_t c = 0;
    int e_i = 0;
    int sigma_bar = 0;
    RangeGeometry geometry;
    PolyMatrix matrix;  // 2 e_i x 2 e_i, evaluated at k = 1, 2, ...
    mpz_class scale;    // constant folded into every entry
};

RangeJob build_range_matrix(const HypergeometricDatum& datum, const Fraction& z, int i, std::int64_t c, int e_i,
                            int sigma_bar);

// last e_i + 1 rows of the 2 e_i identity
IntegerMatrix range_row_selector(int e_i);

// m_{i+1} - m_i - 1
std::uint64_t range_length(const HypergeometricDatum& datum, int i, std::uint64_t p);

struct RangeKey {
    int i;
    std::uint64_t p;
    auto operator<=>(const RangeKey&) const = default;
};

// Product over k = 1..m_{i+1}-m_i-1 of A_{i,c}(k) mod p^{e_i}, row-selected when asked.
std::map<RangeKey, IntegerMatrix> run_ranges(const HypergeometricDatum& datum, const Fraction& z, int e,
                                             const std::vector<std::uint64_t>& primes, bool row_selection = true,
                                             const ForestOptions& opts = {});

// sigma_bar sum_{m_i < m < m_{i+1}} P_m mod p^{e_i} from a range product (row-selected or full)
ResidueElement range_sum(const IntegerMatrix& S, const TruncatedSeries& cih, std::uint64_t p, int e_i);

struct RangeInput {
    RangeConstants constants;
    std::optional<ResidueElement> Pmi;      // needed when tau_bar != 0
    std::optional<ResidueElement> sum;      // sigma_bar * partial sum, needed when sigma_bar != 0
};

ResidueElement assemble_trace(int e, std::uint64_t p, const std::vector<RangeInput>& ranges);

// Unique t = residue mod p^e with t^2 <= r^2 p^w; nullopt when none fits.
std::optional<mpz_class> lift_trace(const ResidueElement& residue, int r, int w);

enum class Method { Amortized, Oracle };
const char* to_string(Method m);

struct TraceResult {
    std::uint64_t p = 0;
    PrimeClass cls = PrimeClass::Good;  // Small is reported as Good with the oracle method
    int e = 0;
    std::optional<ResidueElement> residue;
    std::optional<mpz_class> lifted;
    Method method = Method::Oracle;
};

struct PhaseTimings {
    double phase1 = 0, phase2 = 0, phase3 = 0;
};

struct TraceOptions {
    int e = 0;        // 0: ceil((w+1)/2)
    int threads = 0;  // 0: OpenMP default
    GammaCache* cache = nullptr;
    bool half_interval = true;
    bool row_selection = true;
    ForestOptions forest;
    // Good primes above this bound (and above max{e, d(d-1)}) take the amortized path.
    // Unset: max{e, d(d-1), 4r^2}.
    std::optional<std::uint64_t> amortize_above;
    PhaseTimings* timings = nullptr;
};

std::vector<TraceResult> hypergeometric_traces(const HypergeometricDatum& datum, const Fraction& z, std::uint64_t X,
                                               const TraceOptions& opts = {});

}  // namespace hgm
