#pragma once

// On-disk cache for expensive artifacts. One file per key: a small header
// (magic, format version, key), the payload, and a CRC-32 over key and
// payload. Writes go to a temporary file that is renamed into place.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "nldlab/kloosterman.hpp"
#include "nldlab/lfunc.hpp"

namespace nldlab {

inline constexpr std::uint32_t kCacheVersion = 1;

struct CacheEntry {
  std::string key;      // operation plus canonical parameters
  std::string payload;  // opaque bytes
  std::uint32_t version = kCacheVersion;
  std::uint32_t checksum = 0;  // crc32 of key then payload
};

enum class CacheStatus { hit, missing, corrupt, version_mismatch, key_mismatch };

std::string cache_status_name(CacheStatus s);

/// crc32 of key followed by payload.
std::uint32_t cache_checksum(const std::string& key, const std::string& payload);

class Cache {
 public:
  /// Creates the directory if needed; throws std::runtime_error when it
  /// cannot be created or written.
  explicit Cache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const;

  /// Writes the entry atomically; returns it with the checksum filled in.
  CacheEntry store(const std::string& key, const std::string& payload) const;

  /// The payload when the file exists, parses, has the current version, the
  /// same key and a valid checksum. *status explains a miss.
  std::optional<CacheEntry> load(const std::string& key, CacheStatus* status = nullptr) const;

  /// Loads, or computes and stores on any miss. *status reports the load outcome.
  std::string get_or_compute(const std::string& key, const std::function<std::string()>& compute,
                             CacheStatus* status = nullptr) const;

 private:
  std::filesystem::path dir_;
};

/// Store-then-load through the cache; throws if the reload is not bitwise equal.
CacheEntry cache_roundtrip(const Cache& cache, const CacheEntry& entry);

// Codecs for the cached artifacts.

std::string kloosterman_table_key(const std::vector<KloostermanPair>& pairs, std::uint64_t N,
                                  std::uint64_t c_max);
std::string encode_kloosterman_table(const KloostermanTable& t);
KloostermanTable decode_kloosterman_table(const std::string& bytes);

/// CSV with header q,char_index,gamma; a final "#certified,<count>,<height>" line
/// carries the argument-principle count so the list can be revalidated.
std::string zero_list_key(std::uint64_t q, std::size_t char_index, double T);
std::string encode_zero_list(const ZeroList& z);
ZeroList decode_zero_list(const std::string& csv);

/// Re-counts zeros on [0, height] by the argument principle and compares with
/// the stored ordinates; true when both agree with the recorded count.
bool revalidate_zero_list(const DirichletCharacter& chi, const ZeroList& z);

/// find_zeros through the cache, revalidating loaded lists; a list that fails
/// revalidation is recomputed and overwritten.
ZeroList cached_find_zeros(const Cache& cache, const DirichletCharacter& chi, double T,
                           CacheStatus* status = nullptr);

/// kloosterman_progression through the cache.
KloostermanTable cached_kloosterman_progression(const Cache& cache, const std::vector<KloostermanPair>& pairs,
                                                std::uint64_t N, std::uint64_t c_max,
                                                CacheStatus* status = nullptr);

}  // namespace nldlab
