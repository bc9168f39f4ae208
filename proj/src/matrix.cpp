#include "hgm/matrix.hpp"

#include <stdexcept>

namespace hgm {

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<mpz_class> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols) throw std::invalid_argument("matrix entry count mismatch");
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntegerMatrix IntegerMatrix::operator*(const IntegerMatrix& o) const { return mul_mod(*this, o, 0); }

IntegerMatrix mul_mod(const IntegerMatrix& a, const IntegerMatrix& b, const mpz_class& m) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix dimension mismatch");
    IntegerMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const mpz_class& x = a(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                mpz_addmul(r(i, j).get_mpz_t(), x.get_mpz_t(), b(k, j).get_mpz_t());
        }
    if (m != 0) r.mod_inplace(m);
    return r;
}

IntegerMatrix IntegerMatrix::mod(const mpz_class& m) const {
    IntegerMatrix r = *this;
    r.mod_inplace(m);
    return r;
}

void IntegerMatrix::mod_inplace(const mpz_class& m) {
    for (auto& x : a_) mpz_mod(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
}

std::size_t IntegerMatrix::max_bits() const {
    std::size_t b = 0;
    for (const auto& x : a_) b = std::max(b, mpz_sizeinbase(x.get_mpz_t(), 2));
    return b;
}

mpz_class IntPoly::eval(const mpz_class& k) const {
    mpz_class acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * k + c[i];
    return acc;
}

int IntPoly::degree() const {
    for (std::size_t i = c.size(); i-- > 0;)
        if (c[i] != 0) return static_cast<int>(i);
    return -1;
}

IntegerMatrix PolyMatrix::eval(const mpz_class& k) const {
    IntegerMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(k);
    return m;
}

}  // namespace hgm
