#include "hgm/forest.hpp"

#include "hgm/residue.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <omp.h>
#include <unistd.h>

namespace hgm {

MatrixGenerator MatrixGenerator::from_list(std::vector<IntegerMatrix> mats) {
    MatrixGenerator g;
    g.length_ = mats.size();
    for (const auto& m : mats)
        if (m.rows() != mats[0].rows() || m.cols() != mats[0].cols())
            throw std::invalid_argument("generator matrices differ in dimension");
    g.list_ = std::move(mats);
    return g;
}

MatrixGenerator MatrixGenerator::from_poly(PolyMatrix m, std::int64_t offset, std::uint64_t length) {
    MatrixGenerator g;
    g.poly_ = std::move(m);
    g.offset_ = offset;
    g.length_ = length;
    return g;
}

std::size_t MatrixGenerator::rows() const {
    if (poly_) return poly_->rows();
    return list_.empty() ? 0 : list_[0].rows();
}

std::size_t MatrixGenerator::cols() const {
    if (poly_) return poly_->cols();
    return list_.empty() ? 0 : list_[0].cols();
}

IntegerMatrix MatrixGenerator::at(std::uint64_t k) const {
    if (k >= length_) throw std::out_of_range("generator index out of range");
    if (poly_) {
        mpz_class kk(static_cast<unsigned long>(k));
        kk += static_cast<long>(offset_);
        return poly_->eval(kk);
    }
    return list_[k];
}

IntegerMatrix MatrixGenerator::range_product(std::uint64_t lo, std::uint64_t hi) const {
    if (hi <= lo) return IntegerMatrix::identity(rows());
    if (hi - lo <= 8) {
        IntegerMatrix acc = at(lo);
        for (std::uint64_t k = lo + 1; k < hi; ++k) acc = acc * at(k);
        return acc;
    }
    std::uint64_t mid = lo + (hi - lo) / 2;
    return range_product(lo, mid) * range_product(mid, hi);
}

void validate_job(const ForestJob& job) {
    const auto& g = job.generator;
    if (g.rows() != g.cols()) throw std::invalid_argument("dimension mismatch: generator is not square");
    if (job.row_selector && job.row_selector->cols() != g.rows())
        throw std::invalid_argument("dimension mismatch: row selector width");
    if (job.cuts.size() != job.primes.size()) throw std::invalid_argument("one cut point per prime required");
    if (job.exponents.size() != 1 && job.exponents.size() != job.primes.size())
        throw std::invalid_argument("exponent list length mismatch");
    for (std::size_t n = 0; n < job.primes.size(); ++n) {
        if (n > 0 && job.primes[n] == job.primes[n - 1]) throw std::invalid_argument("duplicate primes");
        if (n > 0 && job.primes[n] < job.primes[n - 1]) throw std::invalid_argument("primes must be increasing");
        if (job.primes[n] < 3 || job.primes[n] % 2 == 0) throw std::invalid_argument("primes must be odd");
        if (job.cuts[n] > g.length()) throw std::invalid_argument("cut point exceeds generator length");
        if (job.exponent_of(n) < 1) throw std::invalid_argument("exponent must be >= 1");
    }
}

namespace {

struct Leaf {
    std::uint64_t cut;
    std::vector<std::size_t> members;  // indices into job.primes
    mpz_class modulus;
};

std::string spill_path(const std::string& dir, std::size_t tag, std::size_t level) {
    return dir + "/spill-" + std::to_string(::getpid()) + "-" + std::to_string(tag) + "-" +
           std::to_string(level) + ".bin";
}

std::atomic<std::size_t> spill_counter{0};

}  // namespace

ForestResult run_forest(const ForestJob& job, const ForestOptions& opts) {
    validate_job(job);
    const std::size_t dim = job.generator.rows();
    ForestResult out;
    if (job.primes.empty()) return out;

    std::vector<std::size_t> order(job.primes.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return job.cuts[a] < job.cuts[b]; });
    std::vector<Leaf> leaves;
    for (std::size_t n : order) {
        if (leaves.empty() || leaves.back().cut != job.cuts[n]) leaves.push_back({job.cuts[n], {}, 1});
        leaves.back().members.push_back(n);
        leaves.back().modulus *= prime_power(job.primes[n], job.exponent_of(n));
    }
    const std::size_t L = leaves.size();

    std::vector<IntegerMatrix> leaf_mats(L);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t l = 0; l < L; ++l) {
        std::uint64_t lo = l == 0 ? 0 : leaves[l - 1].cut;
        leaf_mats[l] = job.generator.range_product(lo, leaves[l].cut);
    }

    std::size_t blocks = opts.blocks;
    if (blocks == 0) {
        blocks = 1;
        while (blocks * 2048 < L) blocks *= 2;
    }
    blocks = std::min(blocks, L);
    std::vector<std::size_t> bounds(blocks + 1);
    for (std::size_t b = 0; b <= blocks; ++b) bounds[b] = L * b / blocks;

    std::vector<mpz_class> block_mod(blocks, 1);
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t l = bounds[b]; l < bounds[b + 1]; ++l) block_mod[b] *= leaves[l].modulus;
    std::vector<mpz_class> suffix(blocks + 1, 1);
    for (std::size_t b = blocks; b-- > 0;) suffix[b] = block_mod[b] * suffix[b + 1];

    IntegerMatrix running = job.row_selector ? *job.row_selector : IntegerMatrix::identity(dim);
    std::vector<IntegerMatrix> results(L);
    const bool spill = !opts.spill_dir.empty();
    const std::size_t tag = spill_counter++;

    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = bounds[b], n0 = bounds[b + 1] - bounds[b];
        running.mod_inplace(suffix[b]);

        std::vector<std::vector<IntegerMatrix>> prod;
        std::vector<std::vector<mpz_class>> mods;
        prod.emplace_back(leaf_mats.begin() + lo, leaf_mats.begin() + lo + n0);
        mods.emplace_back();
        for (std::size_t l = 0; l < n0; ++l) mods[0].push_back(leaves[lo + l].modulus);
        while (prod.back().size() > 1) {
            const auto& cur = prod.back();
            const auto& curm = mods.back();
            std::size_t n = (cur.size() + 1) / 2;
            std::vector<IntegerMatrix> next(n);
            std::vector<mpz_class> nextm(n);
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < n; ++i) {
                if (2 * i + 1 < cur.size()) {
                    next[i] = cur[2 * i] * cur[2 * i + 1];
                    nextm[i] = curm[2 * i] * curm[2 * i + 1];
                } else {
                    next[i] = cur[2 * i];
                    nextm[i] = curm[2 * i];
                }
            }
            if (spill) {
                std::size_t level = prod.size() - 1;
                write_spill_level(spill_path(opts.spill_dir, tag, level), static_cast<std::uint32_t>(level),
                                  prod.back());
                prod.back().clear();
                prod.back().shrink_to_fit();
            }
            prod.push_back(std::move(next));
            mods.push_back(std::move(nextm));
        }

        const std::size_t top = prod.size() - 1;
        std::vector<IntegerMatrix> x(1, running.mod(mods[top][0]));
        for (std::size_t j = top; j-- > 0;) {
            if (spill) prod[j] = read_spill_level(spill_path(opts.spill_dir, tag, j));
            const auto& pj = prod[j];
            const auto& mj = mods[j];
            std::vector<IntegerMatrix> xj(pj.size());
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < pj.size(); ++i) {
                IntegerMatrix t = x[i / 2].mod(mj[i]);
                if (i % 2 == 1) t = mul_mod(t, pj[i - 1], mj[i]);
                xj[i] = std::move(t);
            }
            x = std::move(xj);
            if (j > 0) { prod[j].clear(); prod[j].shrink_to_fit(); }
            if (spill) std::remove(spill_path(opts.spill_dir, tag, j).c_str());
        }

#pragma omp parallel for schedule(dynamic)
        for (std::size_t l = 0; l < n0; ++l) results[lo + l] = mul_mod(x[l], leaf_mats[lo + l], leaves[lo + l].modulus);

        if (b + 1 < blocks) running = mul_mod(running, prod[top][0], suffix[b + 1]);
    }

    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t n : leaves[l].members)
            out.emplace(job.primes[n], results[l].mod(prime_power(job.primes[n], job.exponent_of(n))));
    return out;
}

ForestResult naive_product(const ForestJob& job) {
    validate_job(job);
    ForestResult out;
    const std::size_t dim = job.generator.rows();
    for (std::size_t n = 0; n < job.primes.size(); ++n) {
        mpz_class m = prime_power(job.primes[n], job.exponent_of(n));
        IntegerMatrix acc = job.row_selector ? job.row_selector->mod(m) : IntegerMatrix::identity(dim).mod(m);
        for (std::uint64_t k = 0; k < job.cuts[n]; ++k) acc = mul_mod(acc, job.generator.at(k), m);
        out.emplace(job.primes[n], std::move(acc));
    }
    return out;
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get(std::istream& is) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        int c = is.get();
        if (c == EOF) throw std::runtime_error("truncated spill file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return static_cast<T>(v);
}

constexpr char kSpillMagic[8] = {'H', 'G', 'M', 'S', 'P', 'I', 'L', 'L'};

}  // namespace

void write_spill_level(const std::string& path, std::uint32_t level, const std::vector<IntegerMatrix>& mats) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open spill file " + path);
    os.write(kSpillMagic, 8);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, mats.empty() ? 0 : static_cast<std::uint32_t>(mats[0].rows()));
    put<std::uint32_t>(os, mats.empty() ? 0 : static_cast<std::uint32_t>(mats[0].cols()));
    put<std::uint32_t>(os, level);
    put<std::uint64_t>(os, mats.size());
    for (const auto& m : mats) {
        if (m.rows() != mats[0].rows() || m.cols() != mats[0].cols())
            throw std::invalid_argument("spill level with mixed dimensions");
        for (const auto& x : m.entries()) {
            put<std::uint8_t>(os, sgn(x) < 0 ? 1 : 0);
            std::size_t count = 0;
            std::vector<std::uint64_t> limbs((mpz_sizeinbase(x.get_mpz_t(), 2) + 63) / 64 + 1);
            mpz_export(limbs.data(), &count, -1, 8, -1, 0, x.get_mpz_t());
            put<std::uint64_t>(os, count);
            for (std::size_t i = 0; i < count; ++i) put<std::uint64_t>(os, limbs[i]);
        }
    }
    if (!os) throw std::runtime_error("failed writing spill file " + path);
}

std::vector<IntegerMatrix> read_spill_level(const std::string& path, std::uint32_t* level) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open spill file " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || !std::equal(magic, magic + 8, kSpillMagic)) throw std::runtime_error("bad spill magic");
    if (get<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported spill version");
    auto rows = get<std::uint32_t>(is);
    auto cols = get<std::uint32_t>(is);
    auto lv = get<std::uint32_t>(is);
    if (level) *level = lv;
    auto count = get<std::uint64_t>(is);
    std::vector<IntegerMatrix> mats;
    mats.reserve(count);
    for (std::uint64_t n = 0; n < count; ++n) {
        IntegerMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                bool neg = get<std::uint8_t>(is) != 0;
                auto nl = get<std::uint64_t>(is);
                std::vector<std::uint64_t> limbs(nl);
                for (auto& w : limbs) w = get<std::uint64_t>(is);
                mpz_class x;
                mpz_import(x.get_mpz_t(), nl, -1, 8, -1, 0, limbs.data());
                if (neg) x = -x;
                m(i, j) = x;
            }
        mats.push_back(std::move(m));
    }
    return mats;
}

}  // namespace hgm
