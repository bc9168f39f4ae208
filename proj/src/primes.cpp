#include "hgm/primes.hpp"

namespace hgm {

std::vector<std::uint64_t> primes_up_to(std::uint64_t X) {
    std::vector<std::uint64_t> out;
    if (X < 2) return out;
    std::vector<bool> composite(X + 1, false);
    for (std::uint64_t i = 2; i <= X; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= X; j += i) composite[j] = true;
    }
    return out;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace hgm
