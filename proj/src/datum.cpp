#include "hgm/datum.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <gmpxx.h>
#include <json.hpp>

namespace hgm {

const char* to_string(DatumErrorKind k) {
    switch (k) {
        case DatumErrorKind::LengthMismatch: return "LengthMismatch";
        case DatumErrorKind::DisjointnessViolation: return "DisjointnessViolation";
        case DatumErrorKind::GaloisStabilityViolation: return "GaloisStabilityViolation";
        case DatumErrorKind::InvalidEntry: return "InvalidEntry";
        case DatumErrorKind::NonIntegralD: return "NonIntegralD";
    }
    return "DatumError";
}

const char* to_string(PrimeClass c) {
    switch (c) {
        case PrimeClass::Wild: return "wild";
        case PrimeClass::Tame: return "tame";
        case PrimeClass::Good: return "good";
        case PrimeClass::Small: return "small";
    }
    return "unknown";
}

namespace {

void check_galois(const std::vector<Fraction>& v, const char* name) {
    std::map<std::int64_t, std::map<std::int64_t, int>> mult;
    for (const auto& x : v) mult[x.den()][x.num()]++;
    for (const auto& [d, nums] : mult) {
        int expected = nums.begin()->second;
        std::int64_t units = 0;
        for (std::int64_t a = 0; a < d; ++a) {
            if (std::gcd(a, d) != 1) continue;
            ++units;
            auto it = nums.find(a);
            int m = it == nums.end() ? 0 : it->second;
            if (m != expected)
                throw DatumError(DatumErrorKind::GaloisStabilityViolation,
                                 std::string(name) + " has " + std::to_string(m) + " copies of " +
                                     Fraction(a, d).str() + " but " + std::to_string(expected) + " of " +
                                     Fraction(nums.begin()->first, d).str());
        }
        (void)units;
    }
}

}  // namespace

HypergeometricDatum validate_datum(std::vector<Fraction> alpha, std::vector<Fraction> beta) {
    if (alpha.size() != beta.size())
        throw DatumError(DatumErrorKind::LengthMismatch,
                         "alpha has " + std::to_string(alpha.size()) + " entries, beta " + std::to_string(beta.size()));
    if (alpha.empty()) throw DatumError(DatumErrorKind::LengthMismatch, "empty datum");
    for (const auto* v : {&alpha, &beta})
        for (const auto& x : *v)
            if (x < Fraction(0) || x >= Fraction(1))
                throw DatumError(DatumErrorKind::InvalidEntry, x.str() + " is not in [0,1)");
    std::sort(alpha.begin(), alpha.end());
    std::sort(beta.begin(), beta.end());
    for (const auto& x : alpha)
        if (std::binary_search(beta.begin(), beta.end(), x))
            throw DatumError(DatumErrorKind::DisjointnessViolation, x.str() + " occurs in both alpha and beta");
    check_galois(alpha, "alpha");
    check_galois(beta, "beta");

    HypergeometricDatum dt;
    dt.alpha_ = std::move(alpha);
    dt.beta_ = std::move(beta);
    for (const auto* v : {&dt.alpha_, &dt.beta_})
        for (const auto& x : *v) dt.d_ = std::max(dt.d_, x.den());
    dt.zero_beta_ = static_cast<int>(std::count(dt.beta_.begin(), dt.beta_.end(), Fraction(0)));

    int zmax = INT32_MIN, zmin = INT32_MAX;
    for (const auto& x : dt.alpha_) zmax = std::max(zmax, zigzag(dt, x));
    for (const auto& x : dt.beta_) zmin = std::min(zmin, zigzag(dt, x));
    dt.w_ = zmax - zmin - 1;
    int twice = dt.w_ + 1 - dt.zero_beta_;
    if (twice % 2 != 0)
        throw DatumError(DatumErrorKind::NonIntegralD, "w + 1 - #{beta_j = 0} is odd");
    dt.D_ = twice / 2;

    dt.breaks_.push_back(Fraction(0));
    for (const auto* v : {&dt.alpha_, &dt.beta_})
        for (const auto& x : *v) dt.breaks_.push_back(x);
    dt.breaks_.push_back(Fraction(1));
    std::sort(dt.breaks_.begin(), dt.breaks_.end());
    dt.breaks_.erase(std::unique(dt.breaks_.begin(), dt.breaks_.end()), dt.breaks_.end());
    return dt;
}

std::string HypergeometricDatum::str() const {
    std::string s;
    for (std::size_t j = 0; j < alpha_.size(); ++j) s += (j ? "," : "") + alpha_[j].str();
    s += ";";
    for (std::size_t j = 0; j < beta_.size(); ++j) s += (j ? "," : "") + beta_[j].str();
    return s;
}

std::vector<Fraction> parse_fraction_list(std::string_view text) {
    std::size_t first = text.find_first_not_of(" \t");
    std::vector<Fraction> out;
    if (first != std::string_view::npos && text[first] == '[') {
        auto j = nlohmann::json::parse(text);
        if (!j.is_array()) throw std::invalid_argument("expected a JSON array of [num, den] pairs");
        for (const auto& e : j) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw std::invalid_argument("expected [num, den] pairs");
            std::int64_t den = e[1].get<std::int64_t>();
            if (den <= 0) throw std::invalid_argument("denominator must be positive");
            out.emplace_back(e[0].get<std::int64_t>(), den);
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (item.find_first_not_of(" \t") != std::string_view::npos) out.push_back(Fraction::parse(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

HypergeometricDatum parse_datum(std::string_view text) {
    auto semi = text.find(';');
    if (semi == std::string_view::npos) throw std::invalid_argument("datum text needs 'alpha;beta'");
    return validate_datum(parse_fraction_list(text.substr(0, semi)), parse_fraction_list(text.substr(semi + 1)));
}

HypergeometricDatum swap_datum(const HypergeometricDatum& datum) {
    return validate_datum(datum.beta(), datum.alpha());
}

int zigzag(const HypergeometricDatum& datum, const Fraction& x) {
    int z = 0;
    for (const auto& a : datum.alpha()) z += a <= x;
    for (const auto& b : datum.beta()) z -= b <= x;
    return z;
}

int zigzag_below(const HypergeometricDatum& datum, const Fraction& x) {
    int z = 0;
    for (const auto& a : datum.alpha()) z += a < x;
    for (const auto& b : datum.beta()) z -= b < x;
    return z;
}

int default_precision(const HypergeometricDatum& datum) { return (datum.weight() + 2) / 2; }

bool is_wild(const HypergeometricDatum& datum, std::uint64_t p) {
    for (const auto* v : {&datum.alpha(), &datum.beta()})
        for (const auto& x : *v)
            if (x.den() % static_cast<std::int64_t>(p) == 0) return true;
    return false;
}

bool is_tame(const Fraction& z, std::uint64_t p) {
    const auto pp = static_cast<std::int64_t>(p);
    Fraction zm1 = z - Fraction(1);
    return z.num() % pp == 0 || z.den() % pp == 0 || zm1.num() % pp == 0;
}

std::uint64_t amortized_bound(const HypergeometricDatum& datum, int e) {
    std::uint64_t d = static_cast<std::uint64_t>(datum.d());
    return std::max<std::uint64_t>(static_cast<std::uint64_t>(e), d * (d - 1));
}

std::uint64_t small_prime_bound(const HypergeometricDatum& datum, int e) {
    std::uint64_t r = static_cast<std::uint64_t>(datum.r());
    return std::max(amortized_bound(datum, e), 4 * r * r);
}

PrimeClass classify_prime(const HypergeometricDatum& datum, const Fraction& z, std::uint64_t p, int e) {
    if (is_wild(datum, p)) return PrimeClass::Wild;
    if (is_tame(z, p)) return PrimeClass::Tame;
    if (p <= small_prime_bound(datum, e)) return PrimeClass::Small;
    return PrimeClass::Good;
}

std::uint64_t cut_index(const Fraction& gamma, std::uint64_t p) {
    __int128 n = static_cast<__int128>(gamma.num()) * static_cast<__int128>(p - 1);
    return static_cast<std::uint64_t>(n / gamma.den());
}

Fraction h_value(const Fraction& gamma, const Fraction& gamma_i, const Fraction& gamma_ic) {
    Fraction iota(gamma <= gamma_i ? 1 : 0);
    return gamma - gamma_i + iota - gamma_ic;
}

namespace {

// b * prod (h_j + k) with the least b making it integral; returns (poly, b)
std::vector<mpq_class> rational_product(const std::vector<Fraction>& hs) {
    std::vector<mpq_class> poly{mpq_class(1)};
    for (const auto& h : hs) {
        mpq_class hq(static_cast<long>(h.num()), static_cast<long>(h.den()));
        hq.canonicalize();
        std::vector<mpq_class> next(poly.size() + 1);
        for (std::size_t t = 0; t < poly.size(); ++t) {
            next[t] += poly[t] * hq;
            next[t + 1] += poly[t];
        }
        poly = std::move(next);
    }
    return poly;
}

}  // namespace

RangeGeometry range_geometry(const HypergeometricDatum& datum, int i, std::int64_t c) {
    if (i < 0 || i >= datum.ranges()) throw std::out_of_range("range index out of range");
    RangeGeometry g;
    g.i = i;
    g.gamma_i = datum.breakpoints()[i];
    g.a_i = g.gamma_i.num();
    g.b_i = g.gamma_i.den();
    g.c = ((c % g.b_i) + g.b_i) % g.b_i;
    if (std::gcd(g.c, g.b_i) != 1) throw std::invalid_argument("class is not a unit modulo b_i");
    g.r_i = ((g.a_i * (g.c - 1)) % g.b_i + g.b_i) % g.b_i;
    g.gamma_ic = Fraction(g.r_i, g.b_i);
    for (const auto& a : datum.alpha()) {
        g.h_alpha.push_back(h_value(a, g.gamma_i, g.gamma_ic));
        g.eps_alpha.push_back(a == g.gamma_i ? 1 : 0);
    }
    for (const auto& b : datum.beta()) {
        g.h_beta.push_back(h_value(b, g.gamma_i, g.gamma_ic));
        g.eps_beta.push_back(b == g.gamma_i ? 1 : 0);
    }
    auto fq = rational_product(g.h_alpha);
    auto gq = rational_product(g.h_beta);
    mpz_class b = 1;
    for (const auto* v : {&fq, &gq})
        for (const auto& x : *v) mpz_lcm(b.get_mpz_t(), b.get_mpz_t(), x.get_den_mpz_t());
    g.b = b.get_si();
    for (const auto& x : fq) g.f.c.push_back(mpz_class(x * b));
    for (const auto& x : gq) g.g.c.push_back(mpz_class(x * b));
    return g;
}

RangeExponents range_exponents(const HypergeometricDatum& datum, int i, std::int64_t c) {
    RangeGeometry g = range_geometry(datum, i, c);
    const int zb = datum.zero_count_beta();
    RangeExponents ex;
    int z_open = zigzag(datum, g.gamma_i);
    ex.sigma_exp = z_open + datum.D() + zb;
    ex.sigma_sign = z_open % 2 == 0 ? 1 : -1;
    int z_end = zigzag_below(datum, g.gamma_i);
    int hits = 0;
    if (g.r_i == 0)
        hits = static_cast<int>(std::count(datum.beta().begin(), datum.beta().end(), g.gamma_i));
    ex.tau_exp = z_end + datum.D() + zb - hits;
    ex.tau_sign = z_end % 2 == 0 ? 1 : -1;
    if (ex.sigma_exp < 0 || ex.tau_exp < 0) throw std::logic_error("negative p-exponent in trace formula");
    return ex;
}

RangeConstants range_constants(const HypergeometricDatum& datum, int e, int i, std::int64_t c) {
    RangeExponents ex = range_exponents(datum, i, c);
    RangeConstants rc;
    if (ex.sigma_exp < e) {
        rc.sigma_bar = ex.sigma_sign;
        rc.e_i = e - ex.sigma_exp;
    }
    if (ex.tau_exp < e) {
        rc.tau_bar = ex.tau_sign;
        rc.e_prime_i = e - ex.tau_exp;
    }
    return rc;
}

std::pair<std::int64_t, std::int64_t> eta_xi_direct(const HypergeometricDatum& datum, std::uint64_t p,
                                                    std::uint64_t m) {
    Fraction t(static_cast<std::int64_t>(m), 1 - static_cast<std::int64_t>(p));
    auto eta = [&](const std::vector<Fraction>& v) {
        Fraction s(0);
        for (const auto& x : v) s = s + ((x + t).frac() - x.frac());
        return s;
    };
    Fraction diff = eta(datum.alpha()) - eta(datum.beta());
    if (!diff.is_integer()) throw std::logic_error("eta difference is not an integer");
    std::int64_t xi = 0;
    for (const auto& b : datum.beta()) {
        if (b == Fraction(0)) ++xi;
        if (b + t == Fraction(0)) --xi;
    }
    return {diff.num(), xi};
}

}  // namespace hgm
