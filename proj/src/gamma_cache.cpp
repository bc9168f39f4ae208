#include "hgm/gamma_cache.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>
#include <unistd.h>

namespace hgm {

namespace {

constexpr char kMagic[8] = {'H', 'G', 'M', 'G', 'A', 'M', 'M', 'A'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
bool get(std::istream& is, T& v) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        int ch = is.get();
        if (ch == EOF) return false;
        acc |= static_cast<std::uint64_t>(static_cast<unsigned char>(ch)) << (8 * i);
    }
    v = static_cast<T>(acc);
    return true;
}

void put_big(std::ostream& os, const mpz_class& v) {
    if (v < 0) throw std::invalid_argument("cache stores non-negative residues only");
    std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    if (v == 0) n = 0;
    std::string buf(n, '\0');
    if (n) mpz_export(buf.data(), nullptr, -1, 1, -1, 0, v.get_mpz_t());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
    os.write(buf.data(), static_cast<std::streamsize>(n));
}

bool get_big(std::istream& is, mpz_class& v) {
    std::uint32_t n = 0;
    if (!get(is, n) || n > (1u << 20)) return false;
    std::string buf(n, '\0');
    if (!is.read(buf.data(), n)) return false;
    v = 0;
    if (n) mpz_import(v.get_mpz_t(), n, -1, 1, -1, 0, buf.data());
    return true;
}

}  // namespace

GammaCache::GammaCache(std::string dir) : dir_(std::move(dir)) {}

std::string GammaCache::path(std::int64_t d, int e, std::uint64_t X, std::uint64_t cls) const {
    return (std::filesystem::path(dir_) / ("gamma-d" + std::to_string(d) + "-e" + std::to_string(e) + "-X" +
                                           std::to_string(X) + "-c" + std::to_string(cls) + ".bin"))
        .string();
}

std::optional<std::vector<GammaExpansion>> GammaCache::load(std::int64_t d, int e, std::uint64_t X,
                                                            std::uint64_t cls) const {
    std::ifstream is(path(d, e, X, cls), std::ios::binary);
    if (!is) return std::nullopt;
    char magic[8];
    if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) return std::nullopt;
    std::uint32_t version = 0;
    std::int64_t d2 = 0;
    std::int32_t e2 = 0;
    std::uint64_t X2 = 0, cls2 = 0, count = 0;
    if (!get(is, version) || version != kVersion) return std::nullopt;
    if (!get(is, d2) || !get(is, e2) || !get(is, X2) || !get(is, cls2) || !get(is, count)) return std::nullopt;
    if (d2 != d || e2 != e || X2 != X || cls2 != cls) return std::nullopt;
    std::vector<GammaExpansion> out;
    for (std::uint64_t n = 0; n < count; ++n) {
        std::uint64_t p = 0;
        std::uint32_t entries = 0;
        if (!get(is, p) || !get(is, entries)) return std::nullopt;
        for (std::uint32_t k = 0; k < entries; ++k) {
            std::int64_t num = 0, den = 0;
            mpz_class c;
            std::uint32_t ncoef = 0;
            if (!get(is, num) || !get(is, den) || !get_big(is, c) || !get(is, ncoef)) return std::nullopt;
            if (den <= 0 || ncoef > static_cast<std::uint32_t>(e)) return std::nullopt;
            std::vector<mpz_class> coeffs(ncoef);
            for (auto& x : coeffs)
                if (!get_big(is, x)) return std::nullopt;
            out.push_back(GammaExpansion{Fraction(num, den), p, ResidueElement(p, e, c),
                                         TruncatedSeries(p, e, Schedule::Graded, std::move(coeffs))});
        }
    }
    return out;
}

void GammaCache::save(std::int64_t d, int e, std::uint64_t X, std::uint64_t cls,
                      const std::vector<GammaExpansion>& list) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    std::filesystem::create_directories(dir_);
    std::map<std::uint64_t, std::vector<const GammaExpansion*>> by_prime;
    for (const auto& ex : list) by_prime[ex.p].push_back(&ex);
    static std::atomic<unsigned> counter{0};
    const std::string final_path = path(d, e, X, cls);
    const std::string tmp = final_path + ".tmp" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write cache file " + tmp);
        os.write(kMagic, 8);
        put<std::uint32_t>(os, kVersion);
        put<std::int64_t>(os, d);
        put<std::int32_t>(os, e);
        put<std::uint64_t>(os, X);
        put<std::uint64_t>(os, cls);
        put<std::uint64_t>(os, by_prime.size());
        for (const auto& [p, exs] : by_prime) {
            put<std::uint64_t>(os, p);
            put<std::uint32_t>(os, static_cast<std::uint32_t>(exs.size()));
            for (const auto* ex : exs) {
                put<std::int64_t>(os, ex->gamma.num());
                put<std::int64_t>(os, ex->gamma.den());
                put_big(os, ex->c.value());
                put<std::uint32_t>(os, static_cast<std::uint32_t>(ex->s.size()));
                for (const auto& x : ex->s.coeffs()) put_big(os, x);
            }
        }
        if (!os) throw std::runtime_error("cache write failed for " + tmp);
    }
    std::filesystem::rename(tmp, final_path);
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("HGM_CACHE_DIR"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home)
        return (std::filesystem::path(home) / ".cache" / "hgm").string();
    return ".hgm-cache";
}

}  // namespace hgm
