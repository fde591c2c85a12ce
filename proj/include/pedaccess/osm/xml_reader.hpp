#ifndef PEDACCESS_OSM_XML_READER_HPP
#define PEDACCESS_OSM_XML_READER_HPP

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <expat.h>

#include "pedaccess/error.hpp"
#include "pedaccess/osm/elements.hpp"

namespace pedaccess::osm {

namespace detail {

inline std::int64_t parse_id(const char* s) {
  std::int64_t v = 0;
  const char* end = s + std::strlen(s);
  auto [ptr, ec] = std::from_chars(s, end, v);
  if (ec != std::errc() || ptr != end) throw ParseError(std::string("malformed OSM id: ") + s);
  return v;
}

// Decimal degrees to 1e-7 units without going through binary floating point.
inline std::int32_t parse_coord7(const char* text) {
  const char* s = text;
  bool neg = false;
  if (*s == '-' || *s == '+') neg = (*s++ == '-');
  std::int64_t whole = 0;
  bool digits = false;
  while (*s >= '0' && *s <= '9') whole = whole * 10 + (*s++ - '0'), digits = true;
  std::int64_t frac = 0;
  int places = 0;
  bool round_up = false;
  if (*s == '.') {
    ++s;
    for (; *s >= '0' && *s <= '9'; ++s, digits = true) {
      if (places < 7) frac = frac * 10 + (*s - '0');
      else if (places == 7) round_up = *s >= '5';
      ++places;
    }
  }
  if (!digits || *s != '\0') {
    // Exponent notation and the like: go through strtod.
    char* end = nullptr;
    const double v = std::strtod(text, &end);
    if (end == text || *end != '\0') throw ParseError(std::string("malformed OSM coordinate: ") + text);
    return static_cast<std::int32_t>(std::llround(v * 1e7));
  }
  for (int i = std::min(places, 7); i < 7; ++i) frac *= 10;
  const std::int64_t v = whole * 10000000 + frac + (round_up ? 1 : 0);
  return static_cast<std::int32_t>(neg ? -v : v);
}

class XmlParser {
 public:
  template <typename Handler>
  static void parse(std::istream& in, Handler& handler, const std::string& name) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr), &XML_ParserFree);
    State<Handler> st{handler};
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), &State<Handler>::start, &State<Handler>::end);
    std::vector<char> buf(1 << 16);
    while (true) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      const auto n = in.gcount();
      const bool last = n < static_cast<std::streamsize>(buf.size());
      if (XML_Parse(parser.get(), buf.data(), static_cast<int>(n), last ? 1 : 0) == XML_STATUS_ERROR) {
        throw ParseError("malformed OSM XML in " + name + " at line " +
                         std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                         XML_ErrorString(XML_GetErrorCode(parser.get())));
      }
      if (!st.error.empty()) throw ParseError(st.error + " in " + name);
      if (last) break;
    }
    if (!st.saw_root) throw ParseError("not an OSM XML document: " + name);
  }

 private:
  template <typename Handler>
  struct State {
    Handler& handler;
    enum class Open { none, node, way, relation } open = Open::none;
    Node node;
    Way way;
    Relation relation;
    bool saw_root = false;
    std::string error;

    static const char* attr(const XML_Char** atts, const char* key) {
      for (int i = 0; atts[i]; i += 2)
        if (std::strcmp(atts[i], key) == 0) return atts[i + 1];
      return nullptr;
    }
    static const char* required(const XML_Char** atts, const char* key, const char* element) {
      const char* v = attr(atts, key);
      if (!v) throw ParseError(std::string("missing attribute '") + key + "' on <" + element + ">");
      return v;
    }

    static void start(void* ud, const XML_Char* name, const XML_Char** atts) {
      auto* st = static_cast<State*>(ud);
      try {
        st->on_start(name, atts);
      } catch (const std::exception& e) {
        if (st->error.empty()) st->error = e.what();
      }
    }
    static void end(void* ud, const XML_Char* name) {
      auto* st = static_cast<State*>(ud);
      try {
        st->on_end(name);
      } catch (const std::exception& e) {
        if (st->error.empty()) st->error = e.what();
      }
    }

    void on_start(const char* name, const XML_Char** atts) {
      if (std::strcmp(name, "osm") == 0 || std::strcmp(name, "osmChange") == 0) {
        saw_root = true;
      } else if (std::strcmp(name, "node") == 0) {
        open = Open::node;
        node = Node{};
        node.id = parse_id(required(atts, "id", "node"));
        node.location.lat7 = parse_coord7(required(atts, "lat", "node"));
        node.location.lon7 = parse_coord7(required(atts, "lon", "node"));
      } else if (std::strcmp(name, "way") == 0) {
        open = Open::way;
        way = Way{};
        way.id = parse_id(required(atts, "id", "way"));
      } else if (std::strcmp(name, "relation") == 0) {
        open = Open::relation;
        relation = Relation{};
        relation.id = parse_id(required(atts, "id", "relation"));
      } else if (std::strcmp(name, "tag") == 0) {
        std::pair<std::string, std::string> kv{required(atts, "k", "tag"), required(atts, "v", "tag")};
        if (open == Open::node)
          node.tags.push_back(std::move(kv));
        else if (open == Open::way)
          way.tags.push_back(std::move(kv));
        else if (open == Open::relation)
          relation.tags.push_back(std::move(kv));
      } else if (std::strcmp(name, "nd") == 0 && open == Open::way) {
        way.refs.push_back(parse_id(required(atts, "ref", "nd")));
      } else if (std::strcmp(name, "member") == 0 && open == Open::relation) {
        Member m;
        const std::string type = required(atts, "type", "member");
        if (type == "node")
          m.kind = ElementKind::node;
        else if (type == "way")
          m.kind = ElementKind::way;
        else if (type == "relation")
          m.kind = ElementKind::relation;
        else
          throw ParseError("unknown member type '" + type + "'");
        m.ref = parse_id(required(atts, "ref", "member"));
        if (const char* role = attr(atts, "role")) m.role = role;
        relation.members.push_back(std::move(m));
      }
    }

    void on_end(const char* name) {
      if (std::strcmp(name, "node") == 0 && open == Open::node) {
        handler.node(std::move(node));
        open = Open::none;
      } else if (std::strcmp(name, "way") == 0 && open == Open::way) {
        handler.way(std::move(way));
        open = Open::none;
      } else if (std::strcmp(name, "relation") == 0 && open == Open::relation) {
        handler.relation(std::move(relation));
        open = Open::none;
      }
    }
  };
};

}  // namespace detail

/// Streams every element of an OSM XML document into the handler.
template <typename Handler>
void read_xml(std::istream& in, Handler& handler, const std::string& name = "<stream>") {
  detail::XmlParser::parse(in, handler, name);
}

}  // namespace pedaccess::osm

#endif  // PEDACCESS_OSM_XML_READER_HPP
