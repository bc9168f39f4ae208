#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hgm/gamma.hpp"

namespace hgm {

// One file per (d, e, X, class):
//   "HGMGAMMA", u32 version, i64 d, i32 e, u64 X, u64 class, u64 prime count,
//   then per prime: u64 p, u32 entries, per entry i64 num, i64 den, c, u32 n, n coefficients.
// Residues are u32 byte length followed by the magnitude, little-endian.
// Writes go to a temporary name and are renamed into place.
class GammaCache {
public:
    explicit GammaCache(std::string dir);

    const std::string& dir() const { return dir_; }
    std::string path(std::int64_t d, int e, std::uint64_t X, std::uint64_t cls) const;
    std::optional<std::vector<GammaExpansion>> load(std::int64_t d, int e, std::uint64_t X, std::uint64_t cls) const;
    void save(std::int64_t d, int e, std::uint64_t X, std::uint64_t cls, const std::vector<GammaExpansion>& list);

private:
    std::string dir_;
    std::mutex write_mutex_;
};

// $HGM_CACHE_DIR, else ~/.cache/hgm, else ./.hgm-cache
std::string default_cache_dir();

}  // namespace hgm
