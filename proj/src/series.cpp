#include "hgm/series.hpp"

#include <algorithm>
#include <stdexcept>

namespace hgm {

TruncatedSeries::TruncatedSeries(std::uint64_t p, int e, Schedule s, std::vector<mpz_class> coeffs)
    : p_(p), e_(e), sched_(s), c_(std::move(coeffs)) {
    if (p < 3) throw std::invalid_argument("series prime must be odd");
    if (e < 1) throw std::invalid_argument("series exponent must be >= 1");
    if (sched_ == Schedule::Graded) {
        if (c_.size() > static_cast<std::size_t>(e)) c_.resize(e);
        mods_.resize(e);
        for (int h = 0; h < e; ++h) mods_[h] = prime_power(p, e - h);
    } else {
        mods_.push_back(prime_power(p, e));
    }
    if (c_.empty()) c_.push_back(0);
    normalize();
}

TruncatedSeries TruncatedSeries::constant(std::uint64_t p, int e, Schedule s, const mpz_class& c) {
    return TruncatedSeries(p, e, s, {c});
}

TruncatedSeries TruncatedSeries::linear(std::uint64_t p, int e, Schedule s, const mpz_class& c0,
                                        const mpz_class& c1) {
    return TruncatedSeries(p, e, s, {c0, c1});
}

void TruncatedSeries::normalize() {
    for (std::size_t h = 0; h < c_.size(); ++h)
        mpz_mod(c_[h].get_mpz_t(), c_[h].get_mpz_t(), mod(h).get_mpz_t());
}

int TruncatedSeries::precision(std::size_t h) const {
    return sched_ == Schedule::Graded ? e_ - static_cast<int>(h) : e_;
}

void TruncatedSeries::check(const TruncatedSeries& o) const {
    if (p_ != o.p_ || e_ != o.e_ || sched_ != o.sched_)
        throw std::invalid_argument("series parameters differ");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    check(o);
    std::vector<mpz_class> r(std::max(size(), o.size()));
    for (std::size_t h = 0; h < r.size(); ++h) {
        if (h < size()) r[h] += c_[h];
        if (h < o.size()) r[h] += o.c_[h];
    }
    return TruncatedSeries(p_, e_, sched_, std::move(r));
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const { return *this + (-o); }

TruncatedSeries TruncatedSeries::operator-() const {
    std::vector<mpz_class> r(c_.size());
    for (std::size_t h = 0; h < r.size(); ++h) r[h] = -c_[h];
    return TruncatedSeries(p_, e_, sched_, std::move(r));
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    check(o);
    std::size_t n = std::max(size(), o.size());
    if (sched_ == Schedule::Graded) n = static_cast<std::size_t>(e_);
    n = std::min(n, size() + o.size() - 1);
    std::vector<mpz_class> r(n);
    for (std::size_t i = 0; i < size() && i < n; ++i)
        for (std::size_t j = 0; j < o.size() && i + j < n; ++j)
            mpz_addmul(r[i + j].get_mpz_t(), c_[i].get_mpz_t(), o.c_[j].get_mpz_t());
    return TruncatedSeries(p_, e_, sched_, std::move(r));
}

TruncatedSeries TruncatedSeries::scale(const mpz_class& k) const {
    std::vector<mpz_class> r(c_.size());
    for (std::size_t h = 0; h < r.size(); ++h) r[h] = c_[h] * k;
    return TruncatedSeries(p_, e_, sched_, std::move(r));
}

mpz_class TruncatedSeries::evaluate(const mpz_class& x) const {
    const mpz_class& m = mods_[0];
    if (sched_ == Schedule::Graded && !mpz_divisible_ui_p(x.get_mpz_t(), p_))
        throw std::invalid_argument("graded series evaluated at a non-multiple of p");
    mpz_class acc = 0;
    for (std::size_t h = c_.size(); h-- > 0;) {
        acc = acc * x + c_[h];
        mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
    }
    return acc;
}

TruncatedSeries TruncatedSeries::exp() const {
    if (sched_ != Schedule::Graded) throw std::invalid_argument("series exp needs the graded schedule");
    if (static_cast<std::uint64_t>(e_) >= p_) throw std::invalid_argument("series exp needs p > e");
    if (c_[0] != 0) throw std::invalid_argument("series exp needs zero constant term");
    TruncatedSeries result = constant(p_, e_, sched_, 1);
    TruncatedSeries power = result;
    mpz_class fact = 1;
    for (int n = 1; n < e_; ++n) {
        power = power * *this;
        fact *= n;
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), fact.get_mpz_t(), mods_[0].get_mpz_t());
        result = result + power.scale(inv);
    }
    return result;
}

TruncatedSeries TruncatedSeries::inverse() const {
    mpz_class a0inv;
    if (mpz_invert(a0inv.get_mpz_t(), c_[0].get_mpz_t(), mods_[0].get_mpz_t()) == 0)
        throw std::domain_error("series constant term is not a unit");
    std::size_t n = sched_ == Schedule::Graded ? static_cast<std::size_t>(e_) : c_.size();
    std::vector<mpz_class> b(n);
    b[0] = a0inv;
    for (std::size_t h = 1; h < n; ++h) {
        mpz_class acc = 0;
        for (std::size_t j = 1; j <= h && j < c_.size(); ++j) acc += c_[j] * b[h - j];
        b[h] = -acc * a0inv;
        mpz_mod(b[h].get_mpz_t(), b[h].get_mpz_t(), mod(h).get_mpz_t());
    }
    return TruncatedSeries(p_, e_, sched_, std::move(b));
}

TruncatedSeries TruncatedSeries::compose_shift(const Fraction& offset) const {
    mpz_class o = reduce_fraction(offset, mods_[0]);
    if (sched_ == Schedule::Graded && o != 0 && !mpz_divisible_ui_p(o.get_mpz_t(), p_))
        throw std::invalid_argument("graded shift needs an offset divisible by p");
    std::size_t n = c_.size();
    std::vector<mpz_class> r(n);
    // r_h = sum_{j>=h} c_j binom(j,h) o^{j-h}
    std::vector<mpz_class> opow(n);
    if (n > 0) opow[0] = 1;
    for (std::size_t k = 1; k < n; ++k) opow[k] = opow[k - 1] * o % mods_[0];
    for (std::size_t h = 0; h < n; ++h) {
        mpz_class acc = 0;
        for (std::size_t j = h; j < n; ++j) {
            mpz_class b;
            mpz_bin_uiui(b.get_mpz_t(), j, h);
            acc += c_[j] * b * opow[j - h];
        }
        r[h] = acc;
    }
    return TruncatedSeries(p_, e_, sched_, std::move(r));
}

TruncatedSeries TruncatedSeries::negate_variable() const {
    std::vector<mpz_class> r(c_);
    for (std::size_t h = 1; h < r.size(); h += 2) r[h] = -r[h];
    return TruncatedSeries(p_, e_, sched_, std::move(r));
}

TruncatedSeries TruncatedSeries::reduce(int e2) const {
    if (e2 > e_) throw std::invalid_argument("cannot raise series precision");
    return TruncatedSeries(p_, e2, sched_, c_);
}

bool TruncatedSeries::operator==(const TruncatedSeries& o) const {
    if (p_ != o.p_ || e_ != o.e_ || sched_ != o.sched_) return false;
    std::size_t n = std::max(size(), o.size());
    for (std::size_t h = 0; h < n; ++h) {
        mpz_class a = h < size() ? c_[h] : mpz_class(0);
        mpz_class b = h < o.size() ? o.c_[h] : mpz_class(0);
        if (a != b) return false;
    }
    return true;
}

TruncatedSeries series_compose_shift(const TruncatedSeries& s, const Fraction& offset) {
    return s.compose_shift(offset);
}

}  // namespace hgm
