#ifndef PEDACCESS_OSM_READER_HPP
#define PEDACCESS_OSM_READER_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "pedaccess/error.hpp"
#include "pedaccess/osm/elements.hpp"
#include "pedaccess/osm/pbf_reader.hpp"
#include "pedaccess/osm/xml_reader.hpp"

namespace pedaccess::osm {

enum class FileFormat { xml, pbf };

/// Sniffs the first bytes: XML documents start with '<' (after optional BOM/whitespace).
inline FileFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open OSM file: " + path.string());
  char buf[16] = {};
  in.read(buf, sizeof buf);
  const auto n = static_cast<std::size_t>(in.gcount());
  std::size_t i = 0;
  if (n >= 3 && static_cast<unsigned char>(buf[0]) == 0xEF && static_cast<unsigned char>(buf[1]) == 0xBB &&
      static_cast<unsigned char>(buf[2]) == 0xBF)
    i = 3;
  while (i < n && (buf[i] == ' ' || buf[i] == '\n' || buf[i] == '\r' || buf[i] == '\t')) ++i;
  if (i < n && buf[i] == '<') return FileFormat::xml;
  if (n >= 4) return FileFormat::pbf;
  throw ParseError("unrecognized OSM file: " + path.string());
}

/// Streams every element of an XML or PBF extract into the handler.
template <typename Handler>
void read_osm(const std::filesystem::path& path, Handler& handler) {
  const FileFormat fmt = detect_format(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open OSM file: " + path.string());
  if (fmt == FileFormat::xml)
    read_xml(in, handler, path.string());
  else
    read_pbf(in, handler, path.string());
}

namespace detail {

struct Collector {
  Data data;

  void node(Node&& n) {
    ++data.diagnostics.nodes;
    data.locations[n.id] = n.location;
    if (!n.tags.empty()) data.tagged_nodes.push_back(std::move(n));
  }
  void way(Way&& w) {
    ++data.diagnostics.ways;
    if (w.refs.size() >= 2) data.ways.push_back(std::move(w));
  }
  void relation(Relation&& r) {
    ++data.diagnostics.relations;
    data.relations.push_back(std::move(r));
  }
};

}  // namespace detail

/// Parses an extract, resolving way geometry against the node table afterwards.
/// Ways referencing absent nodes are dropped and counted in diagnostics.
inline Data load_osm(const std::filesystem::path& path) {
  detail::Collector c;
  read_osm(path, c);
  Data& d = c.data;
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::stable_sort(d.tagged_nodes.begin(), d.tagged_nodes.end(), by_id);
  std::stable_sort(d.ways.begin(), d.ways.end(), by_id);
  std::stable_sort(d.relations.begin(), d.relations.end(), by_id);
  std::erase_if(d.ways, [&](const Way& w) {
    const bool missing = std::any_of(w.refs.begin(), w.refs.end(),
                                     [&](std::int64_t id) { return !d.locations.contains(id); });
    if (missing) ++d.diagnostics.ways_missing_nodes;
    return missing;
  });
  return std::move(d);
}

}  // namespace pedaccess::osm

#endif  // PEDACCESS_OSM_READER_HPP
