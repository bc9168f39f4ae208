#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hgm/matrix.hpp"

namespace hgm {

// A_0 .. A_{b-1}: either stored explicitly or a polynomial matrix evaluated at
// k + offset.
class MatrixGenerator {
public:
    MatrixGenerator() = default;
    static MatrixGenerator from_list(std::vector<IntegerMatrix> mats);
    static MatrixGenerator from_poly(PolyMatrix m, std::int64_t offset, std::uint64_t length);

    std::size_t rows() const;
    std::size_t cols() const;
    std::uint64_t length() const { return length_; }
    IntegerMatrix at(std::uint64_t k) const;
    // exact A_lo * ... * A_{hi-1}
    IntegerMatrix range_product(std::uint64_t lo, std::uint64_t hi) const;

private:
    std::vector<IntegerMatrix> list_;
    std::optional<PolyMatrix> poly_;
    std::int64_t offset_ = 0;
    std::uint64_t length_ = 0;
};

struct ForestJob {
    MatrixGenerator generator;
    std::vector<std::uint64_t> primes;  // strictly increasing, odd
    std::vector<std::uint64_t> cuts;    // one per prime, each <= generator.length()
    std::vector<int> exponents;         // one entry (uniform) or one per prime
    std::optional<IntegerMatrix> row_selector;

    int exponent_of(std::size_t n) const { return exponents.size() == 1 ? exponents[0] : exponents[n]; }
};

struct ForestOptions {
    std::size_t blocks = 0;  // 0 picks a count from the number of leaves
    std::string spill_dir;   // non-empty: product-tree levels are written there and reloaded
};

using ForestResult = std::map<std::uint64_t, IntegerMatrix>;

void validate_job(const ForestJob& job);
ForestResult run_forest(const ForestJob& job, const ForestOptions& opts = {});
// Serial reference: left-to-right product per prime.
ForestResult naive_product(const ForestJob& job);

// Spill file: "HGMSPILL", u32 version, u32 rows, u32 cols, u32 level, u64 count,
// then per entry: u8 sign, u64 limb count, 64-bit limbs little-endian.
void write_spill_level(const std::string& path, std::uint32_t level, const std::vector<IntegerMatrix>& mats);
std::vector<IntegerMatrix> read_spill_level(const std::string& path, std::uint32_t* level = nullptr);

}  // namespace hgm
