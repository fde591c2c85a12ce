#ifndef PEDACCESS_OSM_PBF_READER_HPP
#define PEDACCESS_OSM_PBF_READER_HPP

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "pedaccess/error.hpp"
#include "pedaccess/osm/elements.hpp"

namespace pedaccess::osm {

namespace pbf {

/// Minimal protobuf wire-format reader over a byte span.
class ProtoReader {
 public:
  explicit ProtoReader(std::span<const std::uint8_t> data) : p_(data.data()), end_(data.data() + data.size()) {}

  bool next() {
    if (p_ >= end_) return false;
    const std::uint64_t key = varint();
    field_ = static_cast<std::uint32_t>(key >> 3);
    wire_ = static_cast<int>(key & 7);
    return true;
  }
  std::uint32_t field() const { return field_; }
  int wire() const { return wire_; }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (p_ >= end_) throw ParseError("truncated PBF varint");
      const std::uint8_t b = *p_++;
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
    }
    throw ParseError("malformed PBF varint");
  }
  static std::int64_t zigzag(std::uint64_t v) { return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1); }
  std::int64_t svarint() { return zigzag(varint()); }

  std::span<const std::uint8_t> bytes() {
    const std::uint64_t n = varint();
    if (n > static_cast<std::uint64_t>(end_ - p_)) throw ParseError("truncated PBF field");
    std::span<const std::uint8_t> out(p_, static_cast<std::size_t>(n));
    p_ += n;
    return out;
  }
  std::string_view string() {
    auto b = bytes();
    return {reinterpret_cast<const char*>(b.data()), b.size()};
  }

  void skip() {
    switch (wire_) {
      case 0: varint(); break;
      case 1: advance(8); break;
      case 2: bytes(); break;
      case 5: advance(4); break;
      default: throw ParseError("unsupported PBF wire type " + std::to_string(wire_));
    }
  }

  /// Repeated scalar field, packed or not; fn receives the raw varint.
  template <typename Fn>
  void for_each_varint(Fn&& fn) {
    if (wire_ == 2) {
      ProtoReader packed(bytes());
      while (packed.p_ < packed.end_) fn(packed.varint());
    } else if (wire_ == 0) {
      fn(varint());
    } else {
      throw ParseError("unexpected wire type for repeated varint");
    }
  }

 private:
  void advance(std::size_t n) {
    if (static_cast<std::size_t>(end_ - p_) < n) throw ParseError("truncated PBF field");
    p_ += n;
  }

  const std::uint8_t* p_;
  const std::uint8_t* end_;
  std::uint32_t field_ = 0;
  int wire_ = 0;
};

inline std::vector<std::uint8_t> inflate_zlib(std::span<const std::uint8_t> in, std::size_t raw_size) {
  std::vector<std::uint8_t> out(raw_size);
  uLongf len = static_cast<uLongf>(raw_size);
  const int rc = ::uncompress(out.data(), &len, in.data(), static_cast<uLong>(in.size()));
  if (rc != Z_OK || len != raw_size) throw ParseError("corrupt zlib blob in PBF");
  return out;
}

inline std::vector<std::uint8_t> decode_blob(std::span<const std::uint8_t> blob) {
  ProtoReader r(blob);
  std::span<const std::uint8_t> raw, zdata;
  std::uint64_t raw_size = 0;
  bool have_raw = false, have_z = false;
  while (r.next()) {
    switch (r.field()) {
      case 1: raw = r.bytes(); have_raw = true; break;
      case 2: raw_size = r.varint(); break;
      case 3: zdata = r.bytes(); have_z = true; break;
      case 4: case 5: case 6: case 7: throw ParseError("unsupported PBF blob compression");
      default: r.skip();
    }
  }
  if (have_raw) return {raw.begin(), raw.end()};
  if (have_z) return inflate_zlib(zdata, static_cast<std::size_t>(raw_size));
  throw ParseError("empty PBF blob");
}

inline void check_header(std::span<const std::uint8_t> data) {
  ProtoReader r(data);
  while (r.next()) {
    if (r.field() == 4) {
      const std::string_view f = r.string();
      if (f != "OsmSchema-V0.6" && f != "DenseNodes")
        throw ParseError("unsupported PBF required feature: " + std::string(f));
    } else {
      r.skip();
    }
  }
}

struct BlockContext {
  std::vector<std::string_view> strings;
  std::int64_t granularity = 100;
  std::int64_t lat_offset = 0;
  std::int64_t lon_offset = 0;

  std::string s(std::uint64_t i) const {
    if (i >= strings.size()) throw ParseError("PBF string index out of range");
    return std::string(strings[i]);
  }
  static std::int32_t to7(std::int64_t nano) {
    // round half away from zero to 1e-7 degrees
    const std::int64_t q = nano >= 0 ? (nano + 50) / 100 : -((-nano + 50) / 100);
    return static_cast<std::int32_t>(q);
  }
  Location location(std::int64_t lat, std::int64_t lon) const {
    return {to7(lat_offset + granularity * lat), to7(lon_offset + granularity * lon)};
  }
};

inline Tags key_val_tags(const std::vector<std::uint64_t>& keys, const std::vector<std::uint64_t>& vals,
                         const BlockContext& ctx) {
  if (keys.size() != vals.size()) throw ParseError("PBF key/value count mismatch");
  Tags tags;
  tags.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) tags.emplace_back(ctx.s(keys[i]), ctx.s(vals[i]));
  return tags;
}

template <typename Handler>
void decode_node(std::span<const std::uint8_t> data, const BlockContext& ctx, Handler& handler) {
  ProtoReader r(data);
  Node n;
  std::vector<std::uint64_t> keys, vals;
  std::int64_t lat = 0, lon = 0;
  while (r.next()) {
    switch (r.field()) {
      case 1: n.id = r.svarint(); break;
      case 2: r.for_each_varint([&](std::uint64_t v) { keys.push_back(v); }); break;
      case 3: r.for_each_varint([&](std::uint64_t v) { vals.push_back(v); }); break;
      case 8: lat = r.svarint(); break;
      case 9: lon = r.svarint(); break;
      default: r.skip();
    }
  }
  n.location = ctx.location(lat, lon);
  n.tags = key_val_tags(keys, vals, ctx);
  handler.node(std::move(n));
}

template <typename Handler>
void decode_dense(std::span<const std::uint8_t> data, const BlockContext& ctx, Handler& handler) {
  ProtoReader r(data);
  std::vector<std::int64_t> ids, lats, lons;
  std::vector<std::uint64_t> kv;
  auto delta_into = [&](std::vector<std::int64_t>& out) {
    std::int64_t acc = 0;
    r.for_each_varint([&](std::uint64_t v) { out.push_back(acc += ProtoReader::zigzag(v)); });
  };
  while (r.next()) {
    switch (r.field()) {
      case 1: delta_into(ids); break;
      case 8: delta_into(lats); break;
      case 9: delta_into(lons); break;
      case 10: r.for_each_varint([&](std::uint64_t v) { kv.push_back(v); }); break;
      default: r.skip();
    }
  }
  if (lats.size() != ids.size() || lons.size() != ids.size()) throw ParseError("PBF dense node arrays differ in length");
  std::size_t k = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Node n;
    n.id = ids[i];
    n.location = ctx.location(lats[i], lons[i]);
    if (!kv.empty()) {
      while (k < kv.size() && kv[k] != 0) {
        if (k + 1 >= kv.size()) throw ParseError("PBF dense keys_vals truncated");
        n.tags.emplace_back(ctx.s(kv[k]), ctx.s(kv[k + 1]));
        k += 2;
      }
      ++k;  // delimiter
    }
    handler.node(std::move(n));
  }
}

template <typename Handler>
void decode_way(std::span<const std::uint8_t> data, const BlockContext& ctx, Handler& handler) {
  ProtoReader r(data);
  Way w;
  std::vector<std::uint64_t> keys, vals;
  while (r.next()) {
    switch (r.field()) {
      case 1: w.id = static_cast<std::int64_t>(r.varint()); break;
      case 2: r.for_each_varint([&](std::uint64_t v) { keys.push_back(v); }); break;
      case 3: r.for_each_varint([&](std::uint64_t v) { vals.push_back(v); }); break;
      case 8: {
        std::int64_t acc = 0;
        r.for_each_varint([&](std::uint64_t v) { w.refs.push_back(acc += ProtoReader::zigzag(v)); });
        break;
      }
      default: r.skip();
    }
  }
  w.tags = key_val_tags(keys, vals, ctx);
  handler.way(std::move(w));
}

template <typename Handler>
void decode_relation(std::span<const std::uint8_t> data, const BlockContext& ctx, Handler& handler) {
  ProtoReader r(data);
  Relation rel;
  std::vector<std::uint64_t> keys, vals, roles, types;
  std::vector<std::int64_t> memids;
  while (r.next()) {
    switch (r.field()) {
      case 1: rel.id = static_cast<std::int64_t>(r.varint()); break;
      case 2: r.for_each_varint([&](std::uint64_t v) { keys.push_back(v); }); break;
      case 3: r.for_each_varint([&](std::uint64_t v) { vals.push_back(v); }); break;
      case 8: r.for_each_varint([&](std::uint64_t v) { roles.push_back(v); }); break;
      case 9: {
        std::int64_t acc = 0;
        r.for_each_varint([&](std::uint64_t v) { memids.push_back(acc += ProtoReader::zigzag(v)); });
        break;
      }
      case 10: r.for_each_varint([&](std::uint64_t v) { types.push_back(v); }); break;
      default: r.skip();
    }
  }
  if (roles.size() != memids.size() || types.size() != memids.size())
    throw ParseError("PBF relation member arrays differ in length");
  for (std::size_t i = 0; i < memids.size(); ++i) {
    if (types[i] > 2) throw ParseError("unknown PBF member type");
    rel.members.push_back({static_cast<ElementKind>(types[i]), memids[i], ctx.s(roles[i])});
  }
  rel.tags = key_val_tags(keys, vals, ctx);
  handler.relation(std::move(rel));
}

template <typename Handler>
void decode_primitive_block(std::span<const std::uint8_t> data, Handler& handler) {
  BlockContext ctx;
  std::vector<std::span<const std::uint8_t>> groups;
  ProtoReader r(data);
  while (r.next()) {
    switch (r.field()) {
      case 1: {
        ProtoReader st(r.bytes());
        while (st.next()) {
          if (st.field() == 1)
            ctx.strings.push_back(st.string());
          else
            st.skip();
        }
        break;
      }
      case 2: groups.push_back(r.bytes()); break;
      case 17: ctx.granularity = static_cast<std::int64_t>(r.varint()); break;
      case 19: ctx.lat_offset = static_cast<std::int64_t>(r.varint()); break;
      case 20: ctx.lon_offset = static_cast<std::int64_t>(r.varint()); break;
      default: r.skip();
    }
  }
  for (auto g : groups) {
    ProtoReader gr(g);
    while (gr.next()) {
      switch (gr.field()) {
        case 1: decode_node(gr.bytes(), ctx, handler); break;
        case 2: decode_dense(gr.bytes(), ctx, handler); break;
        case 3: decode_way(gr.bytes(), ctx, handler); break;
        case 4: decode_relation(gr.bytes(), ctx, handler); break;
        default: gr.skip();
      }
    }
  }
}

inline bool read_exact(std::istream& in, std::uint8_t* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

}  // namespace pbf

/// Streams every element of an OSM PBF file into the handler, one blob at a time.
template <typename Handler>
void read_pbf(std::istream& in, Handler& handler, const std::string& name = "<stream>") {
  bool saw_header = false;
  std::vector<std::uint8_t> header_buf, blob_buf;
  while (true) {
    std::uint8_t len_be[4];
    in.read(reinterpret_cast<char*>(len_be), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4) throw ParseError("truncated PBF blob header length in " + name);
    const std::uint32_t hlen = (std::uint32_t{len_be[0]} << 24) | (std::uint32_t{len_be[1]} << 16) |
                               (std::uint32_t{len_be[2]} << 8) | std::uint32_t{len_be[3]};
    if (hlen > 64 * 1024) throw ParseError("PBF blob header too large in " + name);
    header_buf.resize(hlen);
    if (!pbf::read_exact(in, header_buf.data(), hlen)) throw ParseError("truncated PBF blob header in " + name);
    std::string type;
    std::uint64_t datasize = 0;
    pbf::ProtoReader hr(header_buf);
    while (hr.next()) {
      if (hr.field() == 1)
        type = hr.string();
      else if (hr.field() == 3)
        datasize = hr.varint();
      else
        hr.skip();
    }
    if (datasize > 64 * 1024 * 1024) throw ParseError("PBF blob too large in " + name);
    blob_buf.resize(static_cast<std::size_t>(datasize));
    if (!pbf::read_exact(in, blob_buf.data(), blob_buf.size())) throw ParseError("truncated PBF blob in " + name);
    const auto data = pbf::decode_blob(blob_buf);
    if (type == "OSMHeader") {
      pbf::check_header(data);
      saw_header = true;
    } else if (type == "OSMData") {
      if (!saw_header) throw ParseError("PBF data block before header in " + name);
      pbf::decode_primitive_block(data, handler);
    }
  }
  if (!saw_header) throw ParseError("not an OSM PBF file: " + name);
}

}  // namespace pedaccess::osm

#endif  // PEDACCESS_OSM_PBF_READER_HPP
