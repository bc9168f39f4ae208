#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace hgm {

class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<mpz_class> entries);
    static IntegerMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    mpz_class& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    const std::vector<mpz_class>& entries() const { return a_; }

    IntegerMatrix operator*(const IntegerMatrix& o) const;
    bool operator==(const IntegerMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    // entrywise reduction into [0, m)
    IntegerMatrix mod(const mpz_class& m) const;
    void mod_inplace(const mpz_class& m);
    std::size_t max_bits() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<mpz_class> a_;
};

// product a*b reduced mod m (m == 0 means no reduction)
IntegerMatrix mul_mod(const IntegerMatrix& a, const IntegerMatrix& b, const mpz_class& m);

// Integer polynomial in one variable, coefficients low degree first.
struct IntPoly {
    std::vector<mpz_class> c;
    mpz_class eval(const mpz_class& k) const;
    int degree() const;
};

class PolyMatrix {
public:
    PolyMatrix() = default;
    PolyMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    IntPoly& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const IntPoly& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    IntegerMatrix eval(const mpz_class& k) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<IntPoly> a_;
};

}  // namespace hgm
