#include "nldlab/cache.hpp"

#include <zlib.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "nldlab/characters.hpp"

namespace nldlab {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'N', 'L', 'D', 'C'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
bool get(const std::string& in, std::size_t& pos, T& v) {
  if (pos + sizeof(T) > in.size()) return false;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return true;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string cache_status_name(CacheStatus s) {
  switch (s) {
    case CacheStatus::hit:
      return "hit";
    case CacheStatus::missing:
      return "missing";
    case CacheStatus::corrupt:
      return "corrupt";
    case CacheStatus::version_mismatch:
      return "version-mismatch";
    case CacheStatus::key_mismatch:
      return "key-mismatch";
  }
  return "?";
}

std::uint32_t cache_checksum(const std::string& key, const std::string& payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32_z(crc, reinterpret_cast<const Bytef*>(key.data()), key.size());
  crc = crc32_z(crc, reinterpret_cast<const Bytef*>(payload.data()), payload.size());
  return static_cast<std::uint32_t>(crc);
}

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw std::runtime_error("cache directory " + dir_.string() + " cannot be created: " + ec.message());
  }
  const fs::path probe = dir_ / (".probe-" + std::to_string(::getpid()));
  {
    std::ofstream f(probe, std::ios::binary);
    if (!f || !(f << 'x') || !f.flush()) {
      throw std::runtime_error("cache directory " + dir_.string() + " is not writable");
    }
  }
  fs::remove(probe, ec);
}

fs::path Cache::path_for(const std::string& key) const {
  std::string op = key.substr(0, key.find(' '));
  for (char& ch : op) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  }
  return dir_ / (op + "-" + hex32(crc32_z(0, reinterpret_cast<const Bytef*>(key.data()), key.size())) + ".bin");
}

CacheEntry Cache::store(const std::string& key, const std::string& payload) const {
  CacheEntry e{key, payload, kCacheVersion, cache_checksum(key, payload)};
  std::string bytes(kMagic, 4);
  put<std::uint32_t>(bytes, e.version);
  put<std::uint32_t>(bytes, static_cast<std::uint32_t>(key.size()));
  put<std::uint64_t>(bytes, payload.size());
  put<std::uint32_t>(bytes, e.checksum);
  bytes += key;
  bytes += payload;

  const fs::path target = path_for(key);
  const fs::path tmp = target.string() + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write cache file " + tmp.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f.flush()) throw std::runtime_error("cannot write cache file " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename cache file into " + target.string());
  }
  return e;
}

std::optional<CacheEntry> Cache::load(const std::string& key, CacheStatus* status) const {
  auto fail = [&](CacheStatus s) -> std::optional<CacheEntry> {
    if (status) *status = s;
    return std::nullopt;
  };
  const fs::path p = path_for(key);
  if (!fs::exists(p)) return fail(CacheStatus::missing);
  const std::string bytes = read_file(p);
  std::size_t pos = 4;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) return fail(CacheStatus::corrupt);
  CacheEntry e;
  std::uint32_t key_len = 0;
  std::uint64_t payload_len = 0;
  if (!get(bytes, pos, e.version)) return fail(CacheStatus::corrupt);
  if (e.version != kCacheVersion) return fail(CacheStatus::version_mismatch);
  if (!get(bytes, pos, key_len) || !get(bytes, pos, payload_len) || !get(bytes, pos, e.checksum)) {
    return fail(CacheStatus::corrupt);
  }
  if (bytes.size() != pos + key_len + payload_len) return fail(CacheStatus::corrupt);
  e.key = bytes.substr(pos, key_len);
  e.payload = bytes.substr(pos + key_len);
  if (cache_checksum(e.key, e.payload) != e.checksum) return fail(CacheStatus::corrupt);
  if (e.key != key) return fail(CacheStatus::key_mismatch);
  if (status) *status = CacheStatus::hit;
  return e;
}

std::string Cache::get_or_compute(const std::string& key, const std::function<std::string()>& compute,
                                  CacheStatus* status) const {
  CacheStatus s{};
  auto e = load(key, &s);
  if (status) *status = s;
  if (e) return e->payload;
  std::string payload = compute();
  store(key, payload);
  return payload;
}

CacheEntry cache_roundtrip(const Cache& cache, const CacheEntry& entry) {
  const CacheEntry stored = cache.store(entry.key, entry.payload);
  CacheStatus s{};
  auto back = cache.load(entry.key, &s);
  if (!back) throw std::runtime_error("cache round-trip failed: " + cache_status_name(s));
  if (back->payload != stored.payload || back->checksum != stored.checksum) {
    throw std::runtime_error("cache round-trip changed the payload");
  }
  return *back;
}

std::string kloosterman_table_key(const std::vector<KloostermanPair>& pairs, std::uint64_t N,
                                  std::uint64_t c_max) {
  std::string key = "kloosterman N=" + std::to_string(N) + " c_max=" + std::to_string(c_max) + " pairs=";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(pairs[i].m) + ":" + std::to_string(pairs[i].n);
  }
  return key;
}

std::string encode_kloosterman_table(const KloostermanTable& t) {
  std::string out;
  put<std::uint64_t>(out, t.N);
  put<std::uint64_t>(out, t.c_max);
  put<std::uint64_t>(out, t.pairs.size());
  for (const auto& p : t.pairs) {
    put<std::int64_t>(out, p.m);
    put<std::int64_t>(out, p.n);
  }
  for (const auto& row : t.values) {
    put<std::uint64_t>(out, row.size());
    out.append(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(double));
  }
  return out;
}

KloostermanTable decode_kloosterman_table(const std::string& bytes) {
  KloostermanTable t;
  std::size_t pos = 0;
  std::uint64_t n_pairs = 0;
  auto need = [](bool ok) {
    if (!ok) throw std::runtime_error("truncated Kloosterman table");
  };
  need(get(bytes, pos, t.N) && get(bytes, pos, t.c_max) && get(bytes, pos, n_pairs));
  t.pairs.resize(n_pairs);
  for (auto& p : t.pairs) need(get(bytes, pos, p.m) && get(bytes, pos, p.n));
  t.values.resize(n_pairs);
  for (auto& row : t.values) {
    std::uint64_t len = 0;
    need(get(bytes, pos, len) && pos + len * sizeof(double) <= bytes.size());
    row.resize(len);
    std::memcpy(row.data(), bytes.data() + pos, len * sizeof(double));
    pos += len * sizeof(double);
  }
  need(pos == bytes.size());
  return t;
}

std::string zero_list_key(std::uint64_t q, std::size_t char_index, double T) {
  return "zeros q=" + std::to_string(q) + " char=" + std::to_string(char_index) + " T=" + fmt17(T);
}

std::string encode_zero_list(const ZeroList& z) {
  std::string out = "q,char_index,gamma\n";
  for (double g : z.ordinates) {
    out += std::to_string(z.q) + "," + std::to_string(z.char_index) + "," + fmt17(g) + "\n";
  }
  out += "#certified," + std::to_string(z.certified_count) + "," + fmt17(z.height) + "," + fmt17(z.step) + "\n";
  return out;
}

ZeroList decode_zero_list(const std::string& csv) {
  ZeroList z;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "q,char_index,gamma") throw std::runtime_error("zero list: bad header");
  bool trailer = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#certified,", 0) == 0) {
      if (std::sscanf(line.c_str(), "#certified,%ld,%lf,%lf", &z.certified_count, &z.height, &z.step) != 3) {
        throw std::runtime_error("zero list: bad trailer");
      }
      trailer = true;
      continue;
    }
    unsigned long long q = 0, idx = 0;
    double g = 0;
    if (std::sscanf(line.c_str(), "%llu,%llu,%lf", &q, &idx, &g) != 3) {
      throw std::runtime_error("zero list: bad row '" + line + "'");
    }
    z.q = q;
    z.char_index = idx;
    z.ordinates.push_back(g);
  }
  if (!trailer) throw std::runtime_error("zero list: missing certification trailer");
  z.certified = static_cast<long>(z.ordinates.size()) == z.certified_count;
  return z;
}

bool revalidate_zero_list(const DirichletCharacter& chi, const ZeroList& z) {
  if (z.q != chi.modulus() || z.char_index != character_index(chi)) return false;
  const long count = count_zeros_rectangle(chi, 0.0, 1.0, 0.0, z.height).count;
  return count == z.certified_count && count == static_cast<long>(z.ordinates.size());
}

ZeroList cached_find_zeros(const Cache& cache, const DirichletCharacter& chi, double T, CacheStatus* status) {
  const std::string key = zero_list_key(chi.modulus(), character_index(chi), T);
  CacheStatus s{};
  if (auto e = cache.load(key, &s)) {
    ZeroList z = decode_zero_list(e->payload);
    if (revalidate_zero_list(chi, z)) {
      if (status) *status = CacheStatus::hit;
      return z;
    }
    s = CacheStatus::corrupt;
  }
  if (status) *status = s;
  ZeroList z = find_zeros(chi, T);
  if (z.certified) cache.store(key, encode_zero_list(z));
  return z;
}

KloostermanTable cached_kloosterman_progression(const Cache& cache, const std::vector<KloostermanPair>& pairs,
                                                std::uint64_t N, std::uint64_t c_max, CacheStatus* status) {
  const std::string payload = cache.get_or_compute(
      kloosterman_table_key(pairs, N, c_max),
      [&] { return encode_kloosterman_table(kloosterman_progression(pairs, N, c_max)); }, status);
  return decode_kloosterman_table(payload);
}

}  // namespace nldlab
