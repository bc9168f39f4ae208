// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hgm/cli.hpp"
#include "hgm/forest.hpp"
#include "hgm/gamma.hpp"
#include "hgm/oracle.hpp"
#include "hgm/trace.hpp"
#include "support.hpp"

using namespace hgm;
using hgm::testing::Gen;
using hgm::testing::kReferenceZ;
using hgm::testing::reference_data;

namespace {

// Pinned tolerances and sample sizes.
constexpr std::uint64_t kOracleLimit = 4096;
constexpr std::uint64_t kGammaPrimeLimit = 500;
constexpr int kGammaMaxE = 4;
constexpr int kForestJobs = 200;
constexpr std::size_t kForestMaxDim = 6;
constexpr std::uint64_t kForestMaxLength = 200;
constexpr std::uint64_t kForestMaxPrime = 200;
constexpr int kForestMaxE = 4;
constexpr std::uint64_t kIdentityLimit = 10000;
constexpr int kGammaIdentitySamples = 500;
constexpr std::uint64_t kSwapLimit = 1000;
constexpr std::uint64_t kScalingSmall = 1u << 16;
constexpr std::uint64_t kScalingLarge = 1u << 17;
constexpr double kMaxScalingRatio = 3.0;
constexpr int kScalingRepeats = 2;
constexpr std::uint64_t kDeterminismLimit = 2048;

struct Verdict {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ResidueElement signed_one(std::uint64_t p, int e, std::int64_t power) {
    return ResidueElement(p, e, power % 2 == 0 ? 1 : -1);
}

std::int64_t reflection_index(const Fraction& x, std::uint64_t p) {
    mpz_class r = reduce_fraction(x, mpz_class(static_cast<unsigned long>(p)));
    return r == 0 ? static_cast<std::int64_t>(p) : r.get_si();
}

// Sweeps shared by criteria 2 and 7.
struct Sweep {
    std::string datum;
    int r = 0, w = 0, e = 0;
    std::vector<TraceResult> results;
};
std::vector<Sweep> g_sweeps;

Verdict weight_table() {
    const std::vector<int> w = {1, 1, 3, 5, 7}, r = {2, 4, 4, 6, 8};
    Verdict v;
    std::ostringstream os;
    for (std::size_t n = 0; n < reference_data().size(); ++n) {
        auto datum = parse_datum(reference_data()[n]);
        os << (n ? " " : "") << "(w=" << datum.weight() << ",r=" << datum.r() << ")";
        if (datum.weight() != w[n] || datum.r() != r[n]) v.pass = false;
    }
    v.detail = os.str();
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    std::size_t amortized = 0, checked = 0, mismatches = 0;
    std::ostringstream os;
    for (const auto& text : reference_data()) {
        auto datum = parse_datum(text);
        Sweep s{text, datum.r(), datum.weight(), default_precision(datum), {}};
        s.results = hypergeometric_traces(datum, kReferenceZ, kOracleLimit);
        const auto [fdatum, fz] = formula_input(datum, kReferenceZ);
        for (const auto& t : s.results) {
            if (t.cls != PrimeClass::Good || t.p == 2) continue;
            ++checked;
            if (t.method == Method::Amortized) ++amortized;
            if (!t.residue || !(*t.residue == H_p_direct(fdatum, fz, t.p, t.e))) {
                if (mismatches < 5) os << " mismatch " << text << " p=" << t.p << ";";
                ++mismatches;
            }
        }
        g_sweeps.push_back(std::move(s));
    }
    v.pass = mismatches == 0 && amortized > 0;
    v.detail = std::to_string(checked) + " good primes (" + std::to_string(amortized) + " amortized), " +
               std::to_string(mismatches) + " mismatches" + os.str();
    return v;
}

Verdict gamma_tables() {
    Verdict v;
    std::size_t checked = 0, bad = 0;
    for (std::int64_t d : {3, 4, 5, 6, 8, 10, 12}) {
        for (int e = 1; e <= kGammaMaxE; ++e) {
            for (const auto& [key, ex] : gamma_expansion_tables(d, e, kGammaPrimeLimit)) {
                const auto p = static_cast<std::int64_t>(ex.p);
                for (std::int64_t y : {0, 1, -1, 2}) {
                    ResidueElement t(ex.p, e, mpz_class(static_cast<long>(p * y)));
                    ++checked;
                    if (!(eval_gamma(ex, t) == gamma_p_direct(Fraction(p * y) + ex.gamma, ex.p, e))) ++bad;
                }
            }
        }
    }
    v.pass = bad == 0 && checked > 0;
    v.detail = std::to_string(checked) + " evaluations, " + std::to_string(bad) + " mismatches";
    return v;
}

ForestJob random_job(Gen& g) {
    ForestJob job;
    const auto r = static_cast<std::size_t>(g.range(1, static_cast<std::int64_t>(kForestMaxDim)));
    const std::uint64_t b = g.urange(1, kForestMaxLength);
    if (g.coin()) {
        std::vector<IntegerMatrix> mats;
        for (std::uint64_t k = 0; k < b; ++k) mats.push_back(g.matrix(r, r, 1000));
        job.generator = MatrixGenerator::from_list(std::move(mats));
    } else {
        PolyMatrix pm(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                const auto deg = g.range(0, 3);
                for (std::int64_t t = 0; t <= deg; ++t) pm(i, j).c.push_back(static_cast<long>(g.range(-20, 20)));
            }
        job.generator = MatrixGenerator::from_poly(pm, g.range(-10, 10), b);
    }
    for (std::uint64_t p : primes_up_to(kForestMaxPrime))
        if (p > 2 && g.range(0, 2) == 0) job.primes.push_back(p);
    if (job.primes.empty()) job.primes.push_back(3);
    for (std::size_t n = 0; n < job.primes.size(); ++n) job.cuts.push_back(g.urange(0, b));
    if (g.coin()) {
        job.exponents = {static_cast<int>(g.range(1, kForestMaxE))};
    } else {
        for (std::size_t n = 0; n < job.primes.size(); ++n) job.exponents.push_back(static_cast<int>(g.range(1, kForestMaxE)));
    }
    if (g.coin()) job.row_selector = g.matrix(static_cast<std::size_t>(g.range(1, static_cast<std::int64_t>(r))), r, 9);
    return job;
}

Verdict forest_soundness() {
    Gen g(2024);
    int bad = 0;
    for (int it = 0; it < kForestJobs; ++it) {
        ForestJob job = random_job(g);
        ForestOptions opts;
        opts.blocks = static_cast<std::size_t>(g.range(0, 4));
        if (!(run_forest(job, opts) == naive_product(job))) ++bad;
    }
    return {bad == 0, std::to_string(kForestJobs) + " jobs, " + std::to_string(bad) + " mismatches"};
}

Verdict classical_identities() {
    Verdict v;
    std::size_t wilson = 0, wolst = 0, suite = 0, bad = 0;
    for (const auto& [p, f] : factorial_batch(Fraction(1), 1, kIdentityLimit)) {
        ++wilson;
        if (f.value() != p - 1) ++bad;
    }
    for (const auto& [p, h] : harmonic_sums(1, Fraction(1), 3, kIdentityLimit).values) {
        if (p < 5) continue;
        ++wolst;
        if (h.value() != 0) ++bad;
    }
    const std::size_t wilson_expected = primes_up_to(kIdentityLimit).size() - 1;  // odd primes

    Gen g(77);
    const std::vector<std::int64_t> dens = {2, 3, 4, 5, 6, 8, 10, 12};
    for (int it = 0; it < kGammaIdentitySamples; ++it) {
        const std::int64_t d = g.pick(dens);
        const int e = static_cast<int>(g.range(1, 4));
        const std::uint64_t p = g.prime(static_cast<std::uint64_t>(std::max<std::int64_t>(d, e)) + 1, 500);
        if (d % static_cast<std::int64_t>(p) == 0) continue;
        const Fraction gamma = g.unit_fraction(d);
        GammaTable t = gamma_expansion_tables(d, e, std::vector<std::uint64_t>{p});
        const auto ps = static_cast<std::int64_t>(p);
        const std::int64_t y = g.range(-3, 3);
        const Fraction x = Fraction(ps * y) + gamma;
        ResidueElement gx = eval_gamma(t.at({gamma, p}), ResidueElement(p, e, mpz_class(static_cast<long>(ps * y))));
        ResidueElement gy =
            eval_gamma(t.at({Fraction(1) - gamma, p}), ResidueElement(p, e, mpz_class(static_cast<long>(-ps * y))));
        ++suite;
        // Gamma_p(x + 1) = -x Gamma_p(x) for a unit x
        if (!(gamma_p_direct(x + Fraction(1), p, e) == -ResidueElement::from_fraction(x, p, e) * gx)) ++bad;
        // Gamma_p(x) Gamma_p(1 - x) = (-1)^{x0}
        if (!(gx * gy == signed_one(p, e, reflection_index(x, p)))) ++bad;
    }
    v.pass = bad == 0 && wilson == wilson_expected && wolst + 1 == wilson_expected;
    v.detail = "Wilson " + std::to_string(wilson) + " primes, Wolstenholme " + std::to_string(wolst) +
               " primes, functional equation and reflection " + std::to_string(suite) + " samples, " +
               std::to_string(bad) + " failures";
    return v;
}

Verdict swap_symmetry() {
    auto datum = parse_datum(reference_data()[2]);
    auto a = hypergeometric_traces(datum, kReferenceZ, kSwapLimit);
    auto b = hypergeometric_traces(swap_datum(datum), Fraction(1) / kReferenceZ, kSwapLimit);
    std::size_t compared = 0, bad = 0;
    if (a.size() != b.size()) return {false, "record counts differ"};
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (a[n].cls != b[n].cls || a[n].residue.has_value() != b[n].residue.has_value()) {
            ++bad;
            continue;
        }
        if (!a[n].residue) continue;
        ++compared;
        if (!(*a[n].residue == *b[n].residue)) ++bad;
    }
    return {bad == 0 && compared > 0, datum.str() + ": " + std::to_string(compared) + " good primes, " +
                                          std::to_string(bad) + " differences"};
}

Verdict lift_bound() {
    std::size_t lifted = 0, outside = 0, ambiguous = 0, missing = 0;
    for (const auto& s : g_sweeps) {
        const auto big = static_cast<std::uint64_t>(4 * s.r * s.r);
        for (const auto& t : s.results) {
            if (!t.residue) continue;
            if (t.lifted) {
                ++lifted;
                if (*t.lifted * *t.lifted > mpz_class(s.r) * s.r * prime_power(t.p, s.w)) ++outside;
                if (!(ResidueElement(t.p, t.e, *t.lifted) == *t.residue)) ++outside;
            }
            if (t.p <= big) continue;
            try {
                if (!lift_trace(*t.residue, s.r, s.w)) ++missing;
            } catch (const AmbiguousLift&) {
                ++ambiguous;
            }
            if (!t.lifted) ++missing;
        }
    }
    return {lifted > 0 && outside == 0 && ambiguous == 0 && missing == 0,
            std::to_string(lifted) + " lifted traces, " + std::to_string(outside) + " outside r p^{w/2}, " +
                std::to_string(ambiguous) + " ambiguous and " + std::to_string(missing) +
                " unliftable above 4r^2"};
}

double timed_run(const HypergeometricDatum& datum, std::uint64_t X) {
    double best = 1e300;
    for (int k = 0; k < kScalingRepeats; ++k) {
        auto t0 = Clock::now();
        auto res = hypergeometric_traces(datum, kReferenceZ, X);
        best = std::min(best, seconds_since(t0));
        if (res.size() != primes_up_to(X).size()) return -1;
    }
    return best;
}

Verdict scaling() {
    auto datum = parse_datum(reference_data()[0]);
    const double small = timed_run(datum, kScalingSmall);
    const double large = timed_run(datum, kScalingLarge);
    const double ratio = large / small;
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "X=2^16: " << small << " s, X=2^17: " << large << " s, ratio " << ratio << " (limit " << kMaxScalingRatio
       << ")";
    return {small > 0 && large > 0 && ratio <= kMaxScalingRatio, os.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

Verdict determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "hgm-acceptance-determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::vector<std::string> outputs;
    for (int k = 0; k < 2; ++k) {
        const std::string path = (dir / ("run" + std::to_string(k) + ".jsonl")).string();
        RunConfig cfg;
        cfg.alpha = "1/4,1/3,2/3,3/4";
        cfg.beta = "1/6,1/6,5/6,5/6";
        cfg.z = kReferenceZ;
        cfg.limit = kDeterminismLimit;
        cfg.output = path;
        cfg.no_cache = true;
        std::ostringstream out, err;
        if (run(cfg, out, err) != kOk) return {false, "run failed: " + err.str()};
        outputs.push_back(slurp(path));
    }
    std::filesystem::remove_all(dir);
    const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
    return {same, std::to_string(outputs[0].size()) + " bytes per run, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"weight table", weight_table},
        {"oracle equivalence up to 4096", oracle_equivalence},
        {"gamma table correctness", gamma_tables},
        {"forest soundness", forest_soundness},
        {"classical identities", classical_identities},
        {"swap symmetry up to 1000", swap_symmetry},
        {"lift bound", lift_bound},
        {"quasilinear scaling", scaling},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[n].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("%s criterion %zu: %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", n + 1, criteria[n].first.c_str(),
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
