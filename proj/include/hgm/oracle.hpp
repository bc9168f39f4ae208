#pragma once

#include <cstdint>
#include <stdexcept>

#include "hgm/datum.hpp"
#include "hgm/fraction.hpp"
#include "hgm/residue.hpp"

namespace hgm {

struct OracleConfig {
    // largest p^e for the plain factorial loop
    std::uint64_t max_modulus = std::uint64_t(1) << 31;
    // Gamma_p(a + p t) mod p^e is a polynomial of degree < e in t; when p > e,
    // interpolate it from the e integer points a, a+p, ..., a+(e-1)p.
    bool interpolate = true;
    // keep the p-free factorial table of the last (p, e) per thread
    bool memoize = true;
};

class OracleBoundExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// (-1)^N prod_{i < N, p does not divide i} i for the representative N in [1, p^e]
ResidueElement gamma_p_product(const Fraction& x, std::uint64_t p, int e, const OracleConfig& cfg = {});
ResidueElement gamma_p_direct(const Fraction& x, std::uint64_t p, int e, const OracleConfig& cfg = {});
ResidueElement pochhammer_star(const Fraction& gamma, std::uint64_t m, std::uint64_t p, int e,
                               const OracleConfig& cfg = {});
// The trace formula summed term by term.
ResidueElement H_p_direct(const HypergeometricDatum& datum, const Fraction& z, std::uint64_t p, int e,
                          const OracleConfig& cfg = {});

}  // namespace hgm
