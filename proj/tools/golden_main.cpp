// Writes oracle traces as JSON lines {datum, z, p, e, residue} for good primes in (lo, hi].
#include <cstdlib>
#include <iostream>
#include <string>

#include "hgm/datum.hpp"
#include "hgm/oracle.hpp"
#include "hgm/primes.hpp"
#include "hgm/trace.hpp"

int main(int argc, char** argv) {
    if (argc < 5) {
        std::cerr << "usage: hgm_golden DATUM Z LO HI [E]\n  e.g. hgm_golden '1/4,3/4;1/6,5/6' 314/159 2 1024\n";
        return 2;
    }
    try {
        const auto datum = hgm::parse_datum(argv[1]);
        const auto z = hgm::Fraction::parse(argv[2]);
        const std::uint64_t lo = std::stoull(argv[3]), hi = std::stoull(argv[4]);
        const int e = argc > 5 ? std::stoi(argv[5]) : hgm::default_precision(datum);
        const auto [fdatum, fz] = hgm::formula_input(datum, z);
        for (std::uint64_t p : hgm::primes_up_to(hi)) {
            if (p <= lo || p == 2 || hgm::is_wild(fdatum, p) || hgm::is_tame(fz, p)) continue;
            auto h = hgm::H_p_direct(fdatum, fz, p, e);
            std::cout << "{\"datum\":\"" << datum.str() << "\",\"z\":\"" << z.str() << "\",\"p\":" << p
                      << ",\"e\":" << e << ",\"residue\":" << h.value().get_str() << "}\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
