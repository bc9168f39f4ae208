#pragma once

#include <cstdint>
#include <vector>

namespace hgm {

// All primes p <= X, ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t X);

// Keep primes with p = residue mod modulus (modulus 1 keeps everything).
struct PrimeFilter {
    std::uint64_t modulus = 1;
    std::uint64_t residue = 0;
    bool accepts(std::uint64_t p) const { return modulus <= 1 || p % modulus == residue % modulus; }
};

bool is_prime(std::uint64_t n);

}  // namespace hgm
