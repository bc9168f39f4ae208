#pragma once

#include <cstdint>

#include "hgm/fraction.hpp"
#include "hgm/residue.hpp"

namespace hgm {

// log u for u = 1 mod p
ResidueElement padic_log(const ResidueElement& u);
// exp x for x = 0 mod p, needs p > e
ResidueElement padic_exp(const ResidueElement& x);
// the (p-1)-st root of unity congruent to z mod p
ResidueElement teichmuller_lift(const Fraction& z, std::uint64_t p, int e);

}  // namespace hgm
