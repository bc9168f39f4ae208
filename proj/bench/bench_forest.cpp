// Remainder forest against the serial left-to-right reference on the two job shapes
// the pipeline runs: harmonic sums (phase 1) and a range product (phase 3).
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hgm/datum.hpp"
#include "hgm/forest.hpp"
#include "hgm/gamma.hpp"
#include "hgm/primes.hpp"
#include "hgm/trace.hpp"

namespace {

template <typename F>
double timed(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void compare(const std::string& name, const hgm::ForestJob& job) {
    hgm::ForestResult a, b;
    double tf = timed([&] { a = hgm::run_forest(job); });
    double tn = timed([&] { b = hgm::naive_product(job); });
    std::cout << name << ": primes " << job.primes.size() << ", forest " << tf << " s, naive " << tn
              << " s, speedup " << (tf > 0 ? tn / tf : 0.0) << (a == b ? "" : "  MISMATCH") << "\n";
    if (!(a == b)) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
    const std::uint64_t X = argc > 1 ? std::stoull(argv[1]) : 1u << 14;
    const int e = argc > 2 ? std::stoi(argv[2]) : 2;
#ifdef _OPENMP
    std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#endif
    std::vector<std::uint64_t> primes = hgm::gamma_primes(1, e, X);

    {
        hgm::PolyMatrix m(2, 2);
        m(0, 0).c = {0, 1};
        m(1, 1).c = {0, 1};
        m(1, 0).c = {1};
        m(0, 1).c = {0};
        hgm::ForestJob job;
        job.primes = primes;
        for (auto p : primes) job.cuts.push_back(p - 1);
        job.generator = hgm::MatrixGenerator::from_poly(m, 1, primes.back() - 1);
        job.exponents = {e};
        job.row_selector = hgm::IntegerMatrix(1, 2, {0, 1});
        compare("harmonic H_{1,1}", job);
    }
    {
        const auto datum = hgm::parse_datum("1/4,1/3,2/3,3/4;1/6,1/6,5/6,5/6");
        const hgm::Fraction z(314, 159);
        const int i = 2;
        const std::int64_t c = 1;
        const auto rc = hgm::range_constants(datum, e, i, c);
        auto rj = hgm::build_range_matrix(datum, z, i, c, rc.e_i, rc.sigma_bar);
        hgm::ForestJob job;
        const auto b = static_cast<std::uint64_t>(datum.breakpoints()[i].den());
        for (auto p : primes)
            if (p > 30 && p % b == static_cast<std::uint64_t>(c) && !hgm::is_tame(z, p)) job.primes.push_back(p);
        std::uint64_t longest = 0;
        for (auto p : job.primes) {
            job.cuts.push_back(hgm::range_length(datum, i, p));
            longest = std::max(longest, job.cuts.back());
        }
        job.generator = hgm::MatrixGenerator::from_poly(rj.matrix, 1, longest);
        job.exponents = {rc.e_i};
        job.row_selector = hgm::range_row_selector(rc.e_i);
        compare("range product (weight 3, i = 2)", job);
    }
    return 0;
}
