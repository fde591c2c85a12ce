#ifndef PEDACCESS_AUXDATA_ZIP_HPP
#define PEDACCESS_AUXDATA_ZIP_HPP

#include <zlib.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedaccess/error.hpp"

namespace pedaccess::zip {

/// Minimal reader for the stored and deflated members of a zip archive (no zip64, no encryption).
class Archive {
 public:
  explicit Archive(const std::filesystem::path& path) : name_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + name_);
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    index();
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, e] : entries_) out.push_back(n);
    return out;
  }
  bool has(const std::string& member) const { return find(member) != nullptr; }

  /// Contents of a member; members may sit in a single top-level folder.
  std::optional<std::string> read(const std::string& member) const {
    const Entry* e = find(member);
    if (!e) return std::nullopt;
    const std::size_t lh = e->local_offset;
    if (lh + 30 > data_.size() || u32(lh) != 0x04034b50) throw ParseError("bad local header for " + member + " in " + name_);
    const std::size_t start = lh + 30 + u16(lh + 26) + u16(lh + 28);
    if (start + e->compressed > data_.size()) throw ParseError("truncated member " + member + " in " + name_);
    const char* src = data_.data() + start;
    if (e->method == 0) return std::string(src, e->compressed);
    if (e->method != 8) throw ParseError("unsupported zip compression method " + std::to_string(e->method) + " in " + name_);
    std::string out(e->uncompressed, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ParseError("zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(src));
    zs.avail_in = static_cast<uInt>(e->compressed);
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != e->uncompressed)
      throw ParseError("corrupt deflate data for " + member + " in " + name_);
    if (crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())) != e->crc)
      throw ParseError("crc mismatch for " + member + " in " + name_);
    return out;
  }

 private:
  struct Entry {
    std::uint16_t method = 0;
    std::uint32_t crc = 0;
    std::size_t compressed = 0, uncompressed = 0, local_offset = 0;
  };

  std::uint16_t u16(std::size_t at) const {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(data_[at]) |
                                      (static_cast<unsigned char>(data_[at + 1]) << 8));
  }
  std::uint32_t u32(std::size_t at) const { return u16(at) | (static_cast<std::uint32_t>(u16(at + 2)) << 16); }

  void index() {
    if (data_.size() < 22) throw ParseError("not a zip archive: " + name_);
    std::optional<std::size_t> eocd;
    const std::size_t lowest = data_.size() > 22 + 65535 ? data_.size() - 22 - 65535 : 0;
    for (std::size_t i = data_.size() - 22 + 1; i-- > lowest;)
      if (u32(i) == 0x06054b50) {
        eocd = i;
        break;
      }
    if (!eocd) throw ParseError("zip end-of-directory record not found in " + name_);
    const std::size_t count = u16(*eocd + 10);
    std::size_t p = u32(*eocd + 16);
    for (std::size_t k = 0; k < count; ++k) {
      if (p + 46 > data_.size() || u32(p) != 0x02014b50) throw ParseError("corrupt zip central directory in " + name_);
      Entry e;
      e.method = u16(p + 10);
      e.crc = u32(p + 16);
      e.compressed = u32(p + 20);
      e.uncompressed = u32(p + 24);
      const std::size_t nlen = u16(p + 28), xlen = u16(p + 30), clen = u16(p + 32);
      e.local_offset = u32(p + 42);
      if (u16(p + 8) & 1) throw ParseError("encrypted zip members are not supported: " + name_);
      entries_[data_.substr(p + 46, nlen)] = e;
      p += 46 + nlen + xlen + clen;
    }
  }

  const Entry* find(const std::string& member) const {
    if (auto it = entries_.find(member); it != entries_.end()) return &it->second;
    for (const auto& [n, e] : entries_) {
      const auto slash = n.find('/');
      if (slash != std::string::npos && n.find('/', slash + 1) == std::string::npos && n.substr(slash + 1) == member)
        return &e;
    }
    return nullptr;
  }

  std::string name_;
  std::string data_;
  std::map<std::string, Entry> entries_;
};

}  // namespace pedaccess::zip

#endif  // PEDACCESS_AUXDATA_ZIP_HPP
