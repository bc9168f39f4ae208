#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hgm/fraction.hpp"
#include "hgm/matrix.hpp"

namespace hgm {

enum class DatumErrorKind {
    LengthMismatch,
    DisjointnessViolation,
    GaloisStabilityViolation,
    InvalidEntry,
    NonIntegralD,
};

const char* to_string(DatumErrorKind k);

class DatumError : public std::invalid_argument {
public:
    DatumError(DatumErrorKind k, const std::string& msg)
        : std::invalid_argument(std::string(to_string(k)) + ": " + msg), kind_(k) {}
    DatumErrorKind kind() const { return kind_; }

private:
    DatumErrorKind kind_;
};

class HypergeometricDatum {
public:
    const std::vector<Fraction>& alpha() const { return alpha_; }
    const std::vector<Fraction>& beta() const { return beta_; }
    int r() const { return static_cast<int>(alpha_.size()); }
    std::int64_t d() const { return d_; }
    int weight() const { return w_; }
    int D() const { return D_; }
    int zero_count_beta() const { return zero_beta_; }
    // 0 = gamma_0 < ... < gamma_s = 1
    const std::vector<Fraction>& breakpoints() const { return breaks_; }
    int ranges() const { return static_cast<int>(breaks_.size()) - 1; }
    bool zero_in_alpha() const { return !alpha_.empty() && alpha_[0] == Fraction(0); }
    // "a,b;c,d"
    std::string str() const;

private:
    friend HypergeometricDatum validate_datum(std::vector<Fraction>, std::vector<Fraction>);
    std::vector<Fraction> alpha_, beta_, breaks_;
    std::int64_t d_ = 1;
    int w_ = 0, D_ = 0, zero_beta_ = 0;
};

HypergeometricDatum validate_datum(std::vector<Fraction> alpha, std::vector<Fraction> beta);
// "1/4,3/4" or a JSON array such as [[1,4],[3,4]]
std::vector<Fraction> parse_fraction_list(std::string_view text);
// "1/4,3/4;1/6,5/6"
HypergeometricDatum parse_datum(std::string_view text);
// (beta, alpha)
HypergeometricDatum swap_datum(const HypergeometricDatum& datum);

// #{alpha_j <= x} - #{beta_j <= x}
int zigzag(const HypergeometricDatum& datum, const Fraction& x);
// #{alpha_j < x} - #{beta_j < x}
int zigzag_below(const HypergeometricDatum& datum, const Fraction& x);

int default_precision(const HypergeometricDatum& datum);

enum class PrimeClass { Wild, Tame, Good, Small };
const char* to_string(PrimeClass c);

bool is_wild(const HypergeometricDatum& datum, std::uint64_t p);
bool is_tame(const Fraction& z, std::uint64_t p);
// max{e, d(d-1)}: below or at this bound the range decomposition is not used
std::uint64_t amortized_bound(const HypergeometricDatum& datum, int e);
// max{e, d(d-1), 4r^2}
std::uint64_t small_prime_bound(const HypergeometricDatum& datum, int e);
PrimeClass classify_prime(const HypergeometricDatum& datum, const Fraction& z, std::uint64_t p, int e);

// floor(gamma (p-1))
std::uint64_t cut_index(const Fraction& gamma, std::uint64_t p);

struct RangeGeometry {
    int i = 0;
    std::int64_t c = 0;
    std::int64_t a_i = 0, b_i = 1, r_i = 0;
    Fraction gamma_i, gamma_ic;
    std::vector<Fraction> h_alpha, h_beta;
    std::vector<int> eps_alpha, eps_beta;
    std::int64_t b = 1;  // clears denominators of f and g
    IntPoly f, g;        // b * prod (h + k)
};

Fraction h_value(const Fraction& gamma, const Fraction& gamma_i, const Fraction& gamma_ic);
RangeGeometry range_geometry(const HypergeometricDatum& datum, int i, std::int64_t c);

struct RangeConstants {
    int sigma_bar = 0, e_i = 0;        // e_i = 0 when sigma_bar = 0
    int tau_bar = 0, e_prime_i = 0;    // e'_i = 0 when tau_bar = 0
};

// p-exponents and signs before truncation to precision e
struct RangeExponents {
    int sigma_exp = 0, sigma_sign = 1;
    int tau_exp = 0, tau_sign = 1;
};

RangeExponents range_exponents(const HypergeometricDatum& datum, int i, std::int64_t c);
RangeConstants range_constants(const HypergeometricDatum& datum, int e, int i, std::int64_t c);

// (eta_m(alpha) - eta_m(beta), xi_m(beta)) straight from the definitions
std::pair<std::int64_t, std::int64_t> eta_xi_direct(const HypergeometricDatum& datum, std::uint64_t p,
                                                    std::uint64_t m);

}  // namespace hgm
