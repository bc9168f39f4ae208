#include "hgm/trace.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hgm/gamma_cache.hpp"
#include "hgm/oracle.hpp"
#include "hgm/padic.hpp"
#include "hgm/primes.hpp"

namespace hgm {

namespace {

using u64 = std::uint64_t;

// polynomial in k with rational coefficients, low degree first
using QPoly = std::vector<mpq_class>;

QPoly qmul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

QPoly qadd(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

QPoly qscale(const QPoly& a, const mpq_class& s) {
    QPoly r(a);
    for (auto& x : r) x *= s;
    return r;
}

QPoly qpow(const QPoly& a, int n) {
    QPoly r{mpq_class(1)};
    for (int t = 0; t < n; ++t) r = qmul(r, a);
    return r;
}

mpq_class to_q(const Fraction& f) {
    mpq_class q(static_cast<long>(f.num()), static_cast<long>(f.den()));
    q.canonicalize();
    return q;
}

// h + k
QPoly linear_in_k(const Fraction& h) { return {to_q(h), mpq_class(1)}; }

mpz_class binom_signed(long n, long l) {
    // binom(n, l) for any integer n, l >= 0
    mpz_class num = 1, den = 1;
    for (long t = 0; t < l; ++t) {
        num *= (n - t);
        den *= (t + 1);
    }
    return num / den;
}

ResidueElement gamma_product_at(const HypergeometricDatum& datum, const RangeGeometry& g, const GammaStore& store,
                                u64 p, bool edge, const mpz_class& x) {
    const int e = store.exponent();
    ResidueElement num(p, e, 1), den(p, e, 1);
    for (std::size_t j = 0; j < datum.alpha().size(); ++j) {
        Fraction A = edge ? g.h_alpha[j] - Fraction(g.eps_alpha[j]) : g.h_alpha[j] + Fraction(1);
        num = num * ResidueElement(p, e, store.series_at(A, p).evaluate(x));
    }
    for (std::size_t j = 0; j < datum.beta().size(); ++j) {
        Fraction A = edge ? g.h_beta[j] - Fraction(g.eps_beta[j]) : g.h_beta[j] + Fraction(1);
        den = den * ResidueElement(p, e, store.series_at(A, p).evaluate(x));
    }
    return num * den.inverse();
}

// prod_alpha Gamma_p(alpha) / prod_beta Gamma_p(beta)
ResidueElement gamma_base(const HypergeometricDatum& datum, const GammaStore& store, u64 p) {
    const int e = store.exponent();
    ResidueElement num(p, e, 1), den(p, e, 1);
    for (const auto& a : datum.alpha()) num = num * store.value_at(a, p);
    for (const auto& b : datum.beta()) den = den * store.value_at(b, p);
    return num * den.inverse();
}

// log z^{p-1} mod p^e
ResidueElement log_z_power(const Fraction& z, u64 p, int e) {
    ResidueElement zr = ResidueElement::from_fraction(z, p, e);
    return padic_log(zr.pow(mpz_class(static_cast<unsigned long>(p - 1))));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::pair<HypergeometricDatum, Fraction> formula_input(const HypergeometricDatum& datum, const Fraction& z) {
    if (datum.zero_in_alpha()) return {swap_datum(datum), Fraction(1) / z};
    return {datum, z};
}

ResidueElement teichmuller_power(const Fraction& z, u64 m, u64 p, int e) {
    ResidueElement zr = ResidueElement::from_fraction(z, p, e);
    ResidueElement zm = zr.pow(mpz_class(static_cast<unsigned long>(m)));
    if (e == 1) return zm;
    ResidueElement lam = log_z_power(z, p, e);
    // m/(1-p) log z^{p-1}
    ResidueElement arg = lam * ResidueElement::from_fraction(
                                   Fraction(static_cast<std::int64_t>(m), 1 - static_cast<std::int64_t>(p)), p, e);
    return zm * padic_exp(arg);
}

std::vector<std::int64_t> needed_denominators(const HypergeometricDatum& datum) {
    std::set<std::int64_t> dens;
    for (const auto* v : {&datum.alpha(), &datum.beta()})
        for (const auto& x : *v) dens.insert(x.den());
    for (int i = 0; i < datum.ranges(); ++i) {
        const std::int64_t b = datum.breakpoints()[i].den();
        for (std::int64_t c = 0; c < b; ++c) {
            if (std::gcd(c, b) != 1) continue;
            RangeGeometry g = range_geometry(datum, i, c);
            for (const auto* v : {&g.h_alpha, &g.h_beta})
                for (const auto& h : *v) dens.insert(h.den());
        }
    }
    return {dens.begin(), dens.end()};
}

std::uint64_t range_length(const HypergeometricDatum& datum, int i, u64 p) {
    const u64 lo = cut_index(datum.breakpoints()[i], p);
    const u64 hi = cut_index(datum.breakpoints()[i + 1], p);
    if (hi <= lo) throw std::logic_error("breakpoints collide at this prime");
    return hi - lo - 1;
}

ResidueElement compute_Pmi(const HypergeometricDatum& datum, const Fraction& z, int i, u64 p,
                           const GammaStore& store, int prec) {
    if (is_wild(datum, p) || is_tame(z, p)) throw std::invalid_argument("compute_Pmi needs a good prime");
    if (prec > store.exponent()) throw std::invalid_argument("precision exceeds the gamma tables");
    const int e = store.exponent();
    const Fraction gi = datum.breakpoints()[i];
    RangeGeometry g = range_geometry(datum, i, static_cast<std::int64_t>(p % static_cast<u64>(gi.den())));
    const u64 mi = cut_index(gi, p);
    // {gamma + m_i/(1-p)} = h - eps - gamma_{i,c} p/(1-p)
    const auto ps = static_cast<std::int64_t>(p);
    mpz_class x0 = reduce_fraction(Fraction(-g.r_i * ps, g.b_i * (1 - ps)), prime_power(p, e));
    ResidueElement P = teichmuller_power(z, mi, p, e) * gamma_product_at(datum, g, store, p, true, x0) *
                       gamma_base(datum, store, p).inverse();
    return P.reduce(prec);
}

TruncatedSeries compute_cih(const HypergeometricDatum& datum, const Fraction& z, int i, u64 p,
                            const GammaStore& store, int prec) {
    if (is_wild(datum, p) || is_tame(z, p)) throw std::invalid_argument("compute_cih needs a good prime");
    if (prec > store.exponent() || prec < 1) throw std::invalid_argument("bad precision for c_{i,h}");
    const int e = store.exponent();
    const Fraction gi = datum.breakpoints()[i];
    RangeGeometry g = range_geometry(datum, i, static_cast<std::int64_t>(p % static_cast<u64>(gi.den())));
    const u64 mi = cut_index(gi, p);
    const auto ps = static_cast<std::int64_t>(p);

    // G(t) = prod Gamma_p(t + h + 1), alpha over beta
    TruncatedSeries G = TruncatedSeries::constant(p, e, Schedule::Graded, 1);
    TruncatedSeries Gd = G;
    for (const auto& h : g.h_alpha) G = G * store.series_at(h + Fraction(1), p);
    for (const auto& h : g.h_beta) Gd = Gd * store.series_at(h + Fraction(1), p);
    G = G * Gd.inverse();

    // [z]^{m_i+1} exp((gamma_{i,c} - 1) lambda/(1-p)) / B
    ResidueElement k0 = teichmuller_power(z, mi + 1, p, e) * gamma_base(datum, store, p).inverse();
    if (e >= 2) {
        ResidueElement lam = log_z_power(z, p, e);
        ResidueElement arg = lam * ResidueElement::from_fraction(
                                       Fraction(g.r_i - g.b_i, g.b_i) / Fraction(1 - ps), p, e);
        k0 = k0 * padic_exp(arg);
        // exp(mu t), mu = lambda/p
        mpz_class mu = lam.value() / mpz_class(static_cast<unsigned long>(p));
        G = G * TruncatedSeries::linear(p, e, Schedule::Graded, 0, mu).exp();
    }
    G = G.scale(k0.value());
    return G.reduce(prec);
}

RangeJob build_range_matrix(const HypergeometricDatum& datum, const Fraction& z, int i, std::int64_t c, int e_i,
                            int sigma_bar) {
    if (e_i < 1) throw std::invalid_argument("range precision must be >= 1");
    RangeJob job;
    job.i = i;
    job.e_i = e_i;
    job.sigma_bar = sigma_bar;
    job.geometry = range_geometry(datum, i, c);
    job.c = job.geometry.c;
    const RangeGeometry& g = job.geometry;
    const int E = e_i;

    // distinct h over beta with multiplicities
    std::map<Fraction, long> mult;
    for (const auto& h : g.h_beta) ++mult[h];

    QPoly fq, gq;
    for (const auto& x : g.f.c) fq.emplace_back(x);
    for (const auto& x : g.g.c) gq.emplace_back(x);

    // W(x) = prod_j sum_{l<E} binom(-m_j, l) x^l u_j^{E-1-l}, coefficients in k
    std::vector<QPoly> W(E);
    W[0] = {mpq_class(1)};
    QPoly rad{mpq_class(1)};
    for (const auto& [h, m] : mult) {
        const QPoly u = linear_in_k(h);
        rad = qmul(rad, u);
        std::vector<QPoly> factor(E);
        for (int l = 0; l < E; ++l) factor[l] = qscale(qpow(u, E - 1 - l), mpq_class(binom_signed(-m, l)));
        std::vector<QPoly> next(E);
        for (int a = 0; a < E; ++a)
            for (int b = 0; a + b < E; ++b) next[a + b] = qadd(next[a + b], qmul(W[a], factor[b]));
        W = std::move(next);
    }
    // f(x + k) coefficients in x
    std::vector<QPoly> fx(E);
    for (std::size_t n = 0; n < fq.size(); ++n)
        for (int l = 0; l < E && static_cast<std::size_t>(l) <= n; ++l) {
            QPoly term = qpow(QPoly{0, 1}, static_cast<int>(n) - l);
            fx[l] = qadd(fx[l], qscale(term, fq[n] * mpq_class(binom_signed(static_cast<long>(n), l))));
        }
    std::vector<QPoly> F(E);
    for (int a = 0; a < E; ++a)
        for (int b = 0; a + b < E; ++b) F[a + b] = qadd(F[a + b], qmul(fx[a], W[b]));

    const mpz_class zf = z.num(), zg = z.den();
    const QPoly S = qscale(qmul(gq, qpow(rad, E - 1)), mpq_class(zg));
    const QPoly kg = {-to_q(Fraction(g.r_i, g.b_i)), mpq_class(1)};

    std::vector<std::vector<QPoly>> M(2 * E, std::vector<QPoly>(2 * E));
    for (int h = 0; h < E; ++h) {
        M[h][h] = S;
        if (sigma_bar != 0) M[E + h][h] = qscale(qmul(S, qpow(kg, E - h - 1)), mpq_class(sigma_bar));
        for (int h2 = 0; h2 <= h; ++h2) M[E + h][E + h2] = qscale(F[h - h2], mpq_class(zf));
    }
    mpz_class L = 1;
    for (const auto& row : M)
        for (const auto& poly : row)
            for (const auto& q : poly) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.get_den_mpz_t());
    job.scale = L;
    job.matrix = PolyMatrix(2 * E, 2 * E);
    for (int a = 0; a < 2 * E; ++a)
        for (int b = 0; b < 2 * E; ++b) {
            IntPoly ip;
            for (const auto& q : M[a][b]) ip.c.emplace_back(q * L);
            while (ip.c.size() > 1 && ip.c.back() == 0) ip.c.pop_back();
            if (ip.c.empty()) ip.c.push_back(0);
            job.matrix(a, b) = std::move(ip);
        }
    return job;
}

IntegerMatrix range_row_selector(int e_i) {
    IntegerMatrix V(static_cast<std::size_t>(e_i) + 1, 2 * static_cast<std::size_t>(e_i));
    for (int r = 0; r <= e_i; ++r) V(r, e_i - 1 + r) = 1;
    return V;
}

std::map<RangeKey, IntegerMatrix> run_ranges(const HypergeometricDatum& datum, const Fraction& z, int e,
                                             const std::vector<u64>& primes, bool row_selection,
                                             const ForestOptions& opts) {
    std::map<RangeKey, IntegerMatrix> out;
    for (int i = 0; i < datum.ranges(); ++i) {
        const std::int64_t b = datum.breakpoints()[i].den();
        for (std::int64_t c = 0; c < b; ++c) {
            if (std::gcd(c, b) != 1) continue;
            RangeConstants rc = range_constants(datum, e, i, c);
            if (rc.sigma_bar == 0) continue;
            std::vector<u64> ps;
            for (u64 p : primes)
                if (static_cast<std::int64_t>(p % static_cast<u64>(b)) == c) ps.push_back(p);
            if (ps.empty()) continue;
            RangeJob rj = build_range_matrix(datum, z, i, c, rc.e_i, rc.sigma_bar);
            ForestJob job;
            job.primes = ps;
            u64 longest = 0;
            for (u64 p : ps) {
                job.cuts.push_back(range_length(datum, i, p));
                longest = std::max(longest, job.cuts.back());
            }
            job.generator = MatrixGenerator::from_poly(rj.matrix, 1, longest);
            job.exponents = {rc.e_i};
            if (row_selection) job.row_selector = range_row_selector(rc.e_i);
            ForestResult res = run_forest(job, opts);
            for (auto& [p, m] : res) out.emplace(RangeKey{i, p}, std::move(m));
        }
    }
    return out;
}

ResidueElement range_sum(const IntegerMatrix& S, const TruncatedSeries& cih, u64 p, int e_i) {
    const int E = e_i;
    // row offset of the Delta row inside S
    const std::size_t top = S.rows() == static_cast<std::size_t>(E) + 1 ? 0 : static_cast<std::size_t>(E - 1);
    const mpz_class m = prime_power(p, E);
    ResidueElement delta(p, E, S(top, E - 1));
    if (!delta.is_unit()) throw DenominatorCollision("range product denominator divisible by p = " + std::to_string(p));
    const auto ps = static_cast<std::int64_t>(p);
    const mpz_class pi = reduce_fraction(Fraction(ps, 1 - ps), m);
    std::vector<mpz_class> pipow(E + 1);
    pipow[0] = 1;
    for (int t = 1; t <= E; ++t) pipow[t] = pipow[t - 1] * pi % m;
    mpz_class acc = 0;
    for (int a = 1; a <= E; ++a) {
        const std::size_t ca = static_cast<std::size_t>(E - a);
        if (ca >= cih.size()) continue;
        for (int b = 1; b <= a; ++b) acc += cih.coeff(ca) * S(top + a, b - 1) % m * pipow[E - b];
    }
    return ResidueElement(p, E, acc) * delta.inverse();
}

ResidueElement assemble_trace(int e, u64 p, const std::vector<RangeInput>& ranges) {
    ResidueElement acc(p, e, 0);
    for (const auto& r : ranges) {
        const RangeConstants& rc = r.constants;
        if (rc.tau_bar != 0) {
            if (!r.Pmi) throw std::invalid_argument("missing P_{m_i}");
            mpz_class v = r.Pmi->value() * prime_power(p, e - rc.e_prime_i) * rc.tau_bar;
            acc = acc + ResidueElement(p, e, v);
        }
        if (rc.sigma_bar != 0) {
            if (!r.sum) throw std::invalid_argument("missing range sum");
            mpz_class v = r.sum->value() * prime_power(p, e - rc.e_i);
            acc = acc + ResidueElement(p, e, v);
        }
    }
    const auto ps = static_cast<std::int64_t>(p);
    return acc * ResidueElement::from_fraction(Fraction(1, 1 - ps), p, e);
}

std::optional<mpz_class> lift_trace(const ResidueElement& residue, int r, int w) {
    const u64 p = residue.prime();
    const mpz_class& M = residue.modulus();
    // t^2 <= r^2 p^w
    mpz_class bound2 = mpz_class(r) * r * prime_power(p, w);
    mpz_class B;
    mpz_sqrt(B.get_mpz_t(), bound2.get_mpz_t());
    mpz_class t = residue.value() + B;
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), M.get_mpz_t());
    t -= B;
    if (t > B) return std::nullopt;
    if (t + M <= B)
        throw AmbiguousLift("several integers of size at most r p^{w/2} match the residue mod " + M.get_str());
    return t;
}

const char* to_string(Method m) { return m == Method::Amortized ? "amortized" : "oracle"; }

std::vector<TraceResult> hypergeometric_traces(const HypergeometricDatum& input, const Fraction& zin, u64 X,
                                               const TraceOptions& opts) {
    if (zin == Fraction(0) || zin == Fraction(1)) throw std::invalid_argument("z must not be 0 or 1");
    const auto normalized = formula_input(input, zin);
    const HypergeometricDatum& datum = normalized.first;
    const Fraction& z = normalized.second;
    const int e = opts.e > 0 ? opts.e : default_precision(datum);
    const int r = datum.r(), w = datum.weight();
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

    u64 threshold = small_prime_bound(datum, e);
    if (opts.amortize_above) threshold = std::max(*opts.amortize_above, amortized_bound(datum, e));

    std::vector<TraceResult> out;
    std::vector<u64> amortized;
    for (u64 p : primes_up_to(X)) {
        TraceResult t;
        t.p = p;
        t.e = e;
        PrimeClass cls = classify_prime(datum, z, p, e);
        t.cls = cls == PrimeClass::Small ? PrimeClass::Good : cls;
        if (t.cls == PrimeClass::Good && p > threshold && p != 2) {
            t.method = Method::Amortized;
            amortized.push_back(p);
        }
        out.push_back(std::move(t));
    }

    // oracle path: raise the precision until the lift is unique
    for (auto& t : out) {
        if (t.cls != PrimeClass::Good || t.method == Method::Amortized || t.p == 2) continue;
        int el = e;
        mpz_class bound = mpz_class(4 * r) * r * prime_power(t.p, w);
        while (prime_power(t.p, 2 * el) <= bound) ++el;
        ResidueElement full = H_p_direct(datum, z, t.p, el);
        t.residue = full.reduce(e);
        t.lifted = lift_trace(full, r, w);
    }
    if (amortized.empty()) return out;

    // Phase 1: gamma tables
    auto t0 = std::chrono::steady_clock::now();
    GammaStore store(e, X);
    GammaOptions gopts;
    gopts.half_interval = opts.half_interval;
    gopts.forest = opts.forest;
    store.build(needed_denominators(datum), gopts, opts.cache);
    if (opts.timings) opts.timings->phase1 += seconds_since(t0);

    // Phase 2: P_{m_i} and c_{i,h} per prime and range
    t0 = std::chrono::steady_clock::now();
    const int s = datum.ranges();
    std::vector<std::vector<RangeInput>> inputs(amortized.size(), std::vector<RangeInput>(s));
    std::vector<std::vector<TruncatedSeries>> cih(amortized.size(), std::vector<TruncatedSeries>(s));
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t n = 0; n < amortized.size(); ++n) {
        const u64 p = amortized[n];
        for (int i = 0; i < s; ++i) {
            const std::int64_t c = static_cast<std::int64_t>(p % static_cast<u64>(datum.breakpoints()[i].den()));
            RangeConstants rc = range_constants(datum, e, i, c);
            inputs[n][i].constants = rc;
            if (rc.tau_bar != 0) inputs[n][i].Pmi = compute_Pmi(datum, z, i, p, store, rc.e_prime_i);
            if (rc.sigma_bar != 0) cih[n][i] = compute_cih(datum, z, i, p, store, rc.e_i);
        }
    }
    if (opts.timings) opts.timings->phase2 += seconds_since(t0);

    // Phase 3: range products and assembly
    t0 = std::chrono::steady_clock::now();
    auto S = run_ranges(datum, z, e, amortized, opts.row_selection, opts.forest);
    std::vector<ResidueElement> residues(amortized.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t n = 0; n < amortized.size(); ++n) {
        const u64 p = amortized[n];
        for (int i = 0; i < s; ++i) {
            RangeInput& in = inputs[n][i];
            if (in.constants.sigma_bar == 0) continue;
            in.sum = range_sum(S.at(RangeKey{i, p}), cih[n][i], p, in.constants.e_i);
        }
        residues[n] = assemble_trace(e, p, inputs[n]);
    }
    std::size_t n = 0;
    for (auto& t : out) {
        if (t.method != Method::Amortized) continue;
        t.residue = residues[n++];
        try {
            t.lifted = lift_trace(*t.residue, r, w);
        } catch (const AmbiguousLift&) {
            t.lifted.reset();
        }
    }
    if (opts.timings) opts.timings->phase3 += seconds_since(t0);
    return out;
}

}  // namespace hgm
