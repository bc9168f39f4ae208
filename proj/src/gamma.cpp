#include "hgm/gamma.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hgm/gamma_cache.hpp"
#include "hgm/padic.hpp"

namespace hgm {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

void check_gamma(const Fraction& gamma) {
    if (gamma <= Fraction(0) || gamma > Fraction(1)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

mpz_class binom(unsigned long n, unsigned long k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

mpz_class mod_inverse(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::logic_error("non-unit in harmonic product");
    return r;
}

// b with gamma d = -b p mod d, b in [1, d-1]
std::int64_t recentre(const Fraction& gamma, u64 p) {
    const std::int64_t d = gamma.den();
    const std::int64_t pm = static_cast<std::int64_t>(p % static_cast<u64>(d));
    std::int64_t inv = 0;
    for (std::int64_t t = 1; t < d; ++t)
        if ((pm * t) % d == 1) inv = t;
    std::int64_t b = ((-gamma.num() % d + d) % d) * inv % d;
    return b;
}

}  // namespace

std::vector<u64> gamma_primes(std::int64_t d, int e, u64 X, const PrimeFilter* filter) {
    std::vector<u64> out;
    for (u64 p : primes_up_to(X)) {
        if (p == 2 || p <= static_cast<u64>(e)) continue;
        if (d > 1 && static_cast<u64>(d) % p == 0) continue;
        if (filter && !filter->accepts(p)) continue;
        out.push_back(p);
    }
    return out;
}

u64 harmonic_cut(const Fraction& gamma, u64 p) {
    u128 n = static_cast<u128>(gamma.num()) * p;
    u128 d = static_cast<u128>(gamma.den());
    return static_cast<u64>((n + d - 1) / d) - 1;
}

HarmonicRun run_harmonic_job(int j, const Fraction& gamma, int exponent, const std::vector<u64>& primes,
                             const ForestOptions& opts) {
    check_gamma(gamma);
    if (j < 1) throw std::invalid_argument("harmonic order must be >= 1");
    HarmonicRun run;
    if (primes.empty()) return run;
    PolyMatrix m(2, 2);
    IntPoly pw;
    pw.c.assign(static_cast<std::size_t>(j) + 1, 0);
    pw.c[static_cast<std::size_t>(j)] = 1;
    m(0, 0) = pw;
    m(1, 1) = pw;
    m(1, 0).c = {1};
    m(0, 1).c = {0};
    ForestJob job;
    job.primes = primes;
    u64 longest = 0;
    for (u64 p : primes) {
        job.cuts.push_back(harmonic_cut(gamma, p));
        longest = std::max(longest, job.cuts.back());
    }
    job.generator = MatrixGenerator::from_poly(m, 1, longest);
    job.exponents = {exponent};
    job.row_selector = IntegerMatrix(1, 2, {0, 1});
    ForestResult res = run_forest(job, opts);
    run.sums.resize(primes.size());
    run.products.resize(primes.size());
    for (std::size_t n = 0; n < primes.size(); ++n) {
        const IntegerMatrix& row = res.at(primes[n]);
        mpz_class mod = prime_power(primes[n], exponent);
        run.products[n] = row(0, 1);
        run.sums[n] = row(0, 0) * mod_inverse(row(0, 1), mod) % mod;
    }
    return run;
}

std::map<u64, ResidueElement> factorial_batch(const Fraction& gamma, int e, const std::vector<u64>& primes,
                                              const ForestOptions& opts) {
    check_gamma(gamma);
    if (e < 1) throw std::invalid_argument("precision must be >= 1");
    std::map<u64, ResidueElement> out;
    if (primes.empty()) return out;
    PolyMatrix m(1, 1);
    m(0, 0).c = {0, 1};
    ForestJob job;
    job.primes = primes;
    u64 longest = 0;
    for (u64 p : primes) {
        job.cuts.push_back(harmonic_cut(gamma, p));
        longest = std::max(longest, job.cuts.back());
    }
    job.generator = MatrixGenerator::from_poly(m, 1, longest);
    job.exponents = {e};
    ForestResult res = run_forest(job, opts);
    for (u64 p : primes) out.emplace(p, ResidueElement(p, e, res.at(p)(0, 0)));
    return out;
}

std::map<u64, ResidueElement> factorial_batch(const Fraction& gamma, int e, u64 X, const PrimeFilter* filter,
                                              const ForestOptions& opts) {
    std::vector<u64> primes;
    for (u64 p : primes_up_to(X))
        if (p != 2 && (!filter || filter->accepts(p))) primes.push_back(p);
    return factorial_batch(gamma, e, primes, opts);
}

HarmonicTable harmonic_sums(int j, const Fraction& gamma, int e, const std::vector<u64>& primes,
                            const ForestOptions& opts) {
    if (e - j < 1) throw std::invalid_argument("harmonic sums need e - j >= 1");
    HarmonicTable t;
    t.j = j;
    t.gamma = gamma;
    HarmonicRun run = run_harmonic_job(j, gamma, e - j, primes, opts);
    for (std::size_t n = 0; n < primes.size(); ++n)
        t.values.emplace(primes[n], ResidueElement(primes[n], e - j, run.sums[n]));
    return t;
}

HarmonicTable harmonic_sums(int j, const Fraction& gamma, int e, u64 X, const PrimeFilter* filter,
                            const ForestOptions& opts) {
    std::vector<u64> primes;
    for (u64 p : primes_up_to(X))
        if (p != 2 && (!filter || filter->accepts(p))) primes.push_back(p);
    return harmonic_sums(j, gamma, e, primes, opts);
}

TruncatedSeries LogGammaAtZero::series() const {
    std::vector<mpz_class> c(static_cast<std::size_t>(e), 0);
    for (std::size_t j = 1; j < c.size() && j <= w.size(); ++j) {
        mpz_class pj = prime_power(p, static_cast<int>(j));
        if (!mpz_divisible_p(w[j - 1].get_mpz_t(), pj.get_mpz_t()))
            throw std::logic_error("log Gamma_p coefficient not divisible by p^j");
        mpz_divexact(c[j].get_mpz_t(), w[j - 1].get_mpz_t(), pj.get_mpz_t());
    }
    return TruncatedSeries(p, e, Schedule::Graded, std::move(c));
}

std::vector<std::vector<std::int64_t>> difference_operator_matrix(int e) {
    const int n = std::max(e - 1, 0);
    std::vector<std::vector<std::int64_t>> a(n, std::vector<std::int64_t>(n, 0));
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) a[i - 1][j - 1] = binom(j, i - 1).get_si();
    return a;
}

std::map<u64, LogGammaAtZero> log_gamma_at_zero(int e, const std::vector<u64>& primes, const ForestOptions& opts) {
    if (e < 2) throw std::invalid_argument("log_gamma_at_zero needs e >= 2");
    for (u64 p : primes)
        if (p <= static_cast<u64>(e)) throw std::invalid_argument("log_gamma_at_zero needs p > e");
    std::map<u64, LogGammaAtZero> out;
    if (primes.empty()) return out;
    const Fraction one(1);
    // H_{1,1} mod p^e carries (p-1)! along
    std::vector<HarmonicRun> runs;
    runs.push_back(run_harmonic_job(1, one, e, primes, opts));
    for (int j = 2; j <= e - 2; ++j) runs.push_back(run_harmonic_job(j, one, e - j, primes, opts));
    const auto A = difference_operator_matrix(e);
    const int n = e - 1;
    std::vector<LogGammaAtZero> vals(primes.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t k = 0; k < primes.size(); ++k) {
        const u64 p = primes[k];
        const mpz_class m = prime_power(p, e);
        std::vector<mpz_class> v(n);
        ResidueElement fact(p, e, -runs[0].products[k]);
        v[0] = padic_log(fact).value();
        for (int j = 2; j <= n; ++j) {
            mpz_class h = runs[static_cast<std::size_t>(j - 2)].sums[k];
            mpz_class t = h * prime_power(p, j - 1) * mod_inverse(mpz_class(j - 1), m);
            if (j % 2 == 1) t = -t;
            v[j - 1] = t % m;
        }
        std::vector<mpz_class> w(n);
        for (int i = n; i >= 1; --i) {
            mpz_class acc = v[i - 1];
            for (int j = i + 1; j <= n; ++j) acc -= A[i - 1][j - 1] * w[j - 1];
            acc = acc * mod_inverse(mpz_class(A[i - 1][i - 1]), m) % m;
            if (acc < 0) acc += m;
            w[i - 1] = acc;
        }
        vals[k] = LogGammaAtZero{p, e, std::move(w)};
    }
    for (std::size_t k = 0; k < primes.size(); ++k) out.emplace(primes[k], std::move(vals[k]));
    return out;
}

std::map<u64, LogGammaAtZero> log_gamma_at_zero(int e, u64 X, const ForestOptions& opts) {
    return log_gamma_at_zero(e, gamma_primes(1, e, X), opts);
}

GammaTable gamma_expansion_tables(std::int64_t d, int e, const std::vector<u64>& primes, const GammaOptions& opts,
                                  const std::map<u64, LogGammaAtZero>* log0) {
    if (d < 2) throw std::invalid_argument("gamma tables need d >= 2");
    if (e < 1) throw std::invalid_argument("precision must be >= 1");
    for (u64 p : primes) {
        if (static_cast<u64>(d) % p == 0) throw std::invalid_argument("prime divides the denominator");
        if (p <= static_cast<u64>(e) || p == 2) throw std::invalid_argument("gamma tables need odd p > e");
    }
    GammaTable out;
    if (primes.empty()) return out;

    std::map<u64, LogGammaAtZero> own;
    if (e >= 2 && (!log0 || log0->empty())) {
        own = log_gamma_at_zero(e, primes, opts.forest);
        log0 = &own;
    }

    // per b: products (ceil(bp/d)-1)! mod p^e and H_{j,b/d} for j = 1..e-1
    struct BData {
        std::vector<mpz_class> fact;
        std::vector<std::vector<mpz_class>> h;  // h[j-1][k]
    };
    std::map<std::int64_t, BData> bdata;
    for (std::int64_t b = 1; b < d; ++b) {
        if (std::gcd(b, d) != 1) continue;
        if (opts.half_interval && 2 * b > d) continue;
        const Fraction g(b, d);
        BData bd;
        if (e == 1) {
            auto f = factorial_batch(g, 1, primes, opts.forest);
            for (u64 p : primes) bd.fact.push_back(f.at(p).value());
        } else {
            HarmonicRun r1 = run_harmonic_job(1, g, e, primes, opts.forest);
            bd.fact = r1.products;
            bd.h.push_back(std::move(r1.sums));
            for (int j = 2; j <= e - 1; ++j) bd.h.push_back(run_harmonic_job(j, g, e - j, primes, opts.forest).sums);
        }
        bdata.emplace(b, std::move(bd));
    }

    std::vector<Fraction> gammas;
    for (std::int64_t a = 1; a < d; ++a)
        if (std::gcd(a, d) == 1) gammas.emplace_back(a, d);

    std::vector<std::vector<GammaExpansion>> per(primes.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t k = 0; k < primes.size(); ++k) {
        const u64 p = primes[k];
        const mpz_class m = prime_power(p, e);
        TruncatedSeries lg0 = e >= 2 ? log0->at(p).series() : TruncatedSeries(p, 1, Schedule::Graded, {0});
        // direct expansion at b/d-recentred gamma
        auto direct = [&](const Fraction& gamma, std::int64_t b) {
            const BData& bd = bdata.at(b);
            const u64 N = harmonic_cut(Fraction(b, d), p) + 1;
            mpz_class c0 = bd.fact[k];
            if (N % 2 == 1) c0 = -c0;
            GammaExpansion ex{gamma, p, ResidueElement(p, e, c0), TruncatedSeries(p, e, Schedule::Graded, {0})};
            if (e == 1) return ex;
            std::vector<mpz_class> lc(static_cast<std::size_t>(e), 0);
            for (int j = 1; j <= e - 1; ++j) {
                // L_j = a_j - (-1)^j H_j / j
                mpz_class t = bd.h[static_cast<std::size_t>(j - 1)][k] * mod_inverse(mpz_class(j), m);
                if (j % 2 == 0) t = -t;
                lc[static_cast<std::size_t>(j)] = (j < static_cast<int>(lg0.size()) ? lg0.coeff(j) : mpz_class(0)) + t;
            }
            TruncatedSeries L(p, e, Schedule::Graded, std::move(lc));
            TruncatedSeries shifted = L.compose_shift(Fraction(-static_cast<std::int64_t>(p) * b, d));
            ResidueElement l0(p, e, shifted.coeff(0));
            ex.c = ex.c * padic_exp(l0);
            ex.s = shifted - TruncatedSeries::constant(p, e, Schedule::Graded, l0.value());
            return ex;
        };
        std::vector<GammaExpansion> row;
        std::map<Fraction, std::size_t> idx;
        for (const auto& g : gammas) {
            std::int64_t b = recentre(g, p);
            if (bdata.count(b)) {
                idx[g] = row.size();
                row.push_back(direct(g, b));
            }
        }
        for (const auto& g : gammas) {
            if (idx.count(g)) continue;
            // Gamma_p(x+g) Gamma_p(1-g-x) = (-1)^{x0}, x0 = ceil(b p / d)
            const GammaExpansion& o = row[idx.at(Fraction(1) - g)];
            const u64 x0 = harmonic_cut(Fraction(recentre(g, p), d), p) + 1;
            ResidueElement c = o.c.inverse();
            if (x0 % 2 == 1) c = -c;
            row.push_back(GammaExpansion{g, p, c, -o.s.negate_variable()});
        }
        per[k] = std::move(row);
    }
    for (auto& row : per)
        for (auto& ex : row) {
            auto key = std::make_pair(ex.gamma, ex.p);
            out.emplace(key, std::move(ex));
        }
    return out;
}

GammaTable gamma_expansion_tables(std::int64_t d, int e, u64 X, const GammaOptions& opts) {
    return gamma_expansion_tables(d, e, gamma_primes(d, e, X), opts);
}

ResidueElement eval_gamma(const GammaExpansion& ex, const ResidueElement& t) {
    if (t.prime() != ex.p) throw std::invalid_argument("prime mismatch");
    if (!mpz_divisible_ui_p(t.value().get_mpz_t(), ex.p)) throw std::invalid_argument("eval_gamma needs t = 0 mod p");
    const int e = ex.c.exponent();
    mpz_class s = ex.s.evaluate(t.value());
    if (e == 1) return ex.c;
    return ex.c * padic_exp(ResidueElement(ex.p, e, s));
}

bool GammaStore::has(const Fraction& gamma, u64 p) const {
    return table_.count({gamma.num(), gamma.den(), p}) > 0;
}

const GammaExpansion& GammaStore::expansion(const Fraction& gamma, u64 p) const {
    auto it = table_.find({gamma.num(), gamma.den(), p});
    if (it == table_.end())
        throw std::out_of_range("no expansion for " + gamma.str() + " at p = " + std::to_string(p));
    return it->second;
}

TruncatedSeries GammaStore::series_at(const Fraction& A, u64 p) const {
    const Fraction f = A.frac();
    const std::int64_t n = A.floor();
    const GammaExpansion& ex = expansion(f, p);
    TruncatedSeries g = TruncatedSeries::constant(p, e_, Schedule::Graded, ex.c.value());
    if (e_ >= 2) g = g * ex.s.exp();
    const mpz_class m = prime_power(p, e_);
    auto omega = [&](const Fraction& shift) {
        mpz_class c = reduce_fraction(shift, m);
        if (mpz_divisible_ui_p(c.get_mpz_t(), p)) return TruncatedSeries::constant(p, e_, Schedule::Graded, -1);
        return TruncatedSeries::linear(p, e_, Schedule::Graded, -c, -1);
    };
    for (std::int64_t k = 0; k < n; ++k) g = g * omega(f + Fraction(k));
    for (std::int64_t k = -1; k >= n; --k) g = g * omega(f + Fraction(k)).inverse();
    return g;
}

ResidueElement GammaStore::value_at(const Fraction& A, u64 p) const {
    TruncatedSeries s = series_at(A, p);
    return ResidueElement(p, e_, s.coeff(0));
}

void GammaStore::build(const std::vector<std::int64_t>& denominators, const GammaOptions& opts, GammaCache* cache) {
    // fractional parts of a/d have denominators dividing d
    std::vector<std::int64_t> dens{1};
    for (std::int64_t d : denominators) {
        if (d < 1) throw std::invalid_argument("denominator must be positive");
        for (std::int64_t k = 2; k <= d; ++k)
            if (d % k == 0) dens.push_back(k);
    }
    std::sort(dens.begin(), dens.end());
    dens.erase(std::unique(dens.begin(), dens.end()), dens.end());

    std::map<u64, LogGammaAtZero> log0;
    auto need_log0 = [&](const std::vector<u64>& primes) {
        if (e_ < 2) return;
        std::vector<u64> missing;
        for (u64 p : primes)
            if (!log0.count(p)) missing.push_back(p);
        if (missing.empty()) return;
        for (auto& kv : log_gamma_at_zero(e_, missing, opts.forest)) log0.emplace(kv.first, std::move(kv.second));
    };

    for (std::int64_t d : dens) {
        const std::vector<u64> primes = gamma_primes(d, e_, X_);
        // residue classes p mod d hit by the primes
        std::map<u64, std::vector<u64>> classes;
        for (u64 p : primes) classes[d > 1 ? p % static_cast<u64>(d) : 0].push_back(p);
        std::vector<u64> todo;
        for (auto& [cls, ps] : classes) {
            if (cache) {
                auto got = cache->load(d, e_, X_, cls);
                if (got) {
                    ++cache_hits_;
                    for (auto& ex : *got) table_.emplace(std::make_tuple(ex.gamma.num(), ex.gamma.den(), ex.p), std::move(ex));
                    continue;
                }
            }
            todo.insert(todo.end(), ps.begin(), ps.end());
        }
        std::sort(todo.begin(), todo.end());
        if (todo.empty()) continue;

        std::vector<GammaExpansion> fresh;
        if (d == 1) {
            need_log0(todo);
            for (u64 p : todo) {
                TruncatedSeries s = e_ >= 2 ? log0.at(p).series() : TruncatedSeries(p, 1, Schedule::Graded, {0});
                fresh.push_back(GammaExpansion{Fraction(0), p, ResidueElement(p, e_, 1), s});
            }
        } else {
            need_log0(todo);
            std::map<u64, LogGammaAtZero> sub;
            if (e_ >= 2)
                for (u64 p : todo) sub.emplace(p, log0.at(p));
            GammaTable t = gamma_expansion_tables(d, e_, todo, opts, &sub);
            for (auto& kv : t) fresh.push_back(std::move(kv.second));
        }
        std::map<u64, std::vector<GammaExpansion>> by_class;
        for (auto& ex : fresh) by_class[d > 1 ? ex.p % static_cast<u64>(d) : 0].push_back(ex);
        if (cache)
            for (auto& [cls, list] : by_class) cache->save(d, e_, X_, cls, list);
        for (auto& ex : fresh) table_.emplace(std::make_tuple(ex.gamma.num(), ex.gamma.den(), ex.p), std::move(ex));
    }
}

}  // namespace hgm
