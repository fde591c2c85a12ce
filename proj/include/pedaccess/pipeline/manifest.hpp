#ifndef PEDACCESS_PIPELINE_MANIFEST_HPP
#define PEDACCESS_PIPELINE_MANIFEST_HPP

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "pedaccess/error.hpp"

#ifndef PEDACCESS_VERSION
#define PEDACCESS_VERSION "0.0.0"
#endif

namespace pedaccess {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view data) {
    if (EVP_DigestUpdate(ctx_, data.data(), data.size()) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md, &len) != 1) throw Error("sha256 final failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

inline std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  struct FileRecord {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
  };
  struct StageRecord {
    std::string stage;
    std::string region;  // empty for project-wide work
    std::string started;
    std::string finished;
  };

  std::string tool_version = PEDACCESS_VERSION;
  std::string config_sha256;
  std::map<std::string, std::string> inputs;  // path → sha256
  std::vector<StageRecord> stages;
  std::vector<FileRecord> outputs;
  nlohmann::json diagnostics = nlohmann::json::object();

  const FileRecord* output(const std::string& rel) const {
    for (const auto& f : outputs)
      if (f.path == rel) return &f;
    return nullptr;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["config_sha256"] = config_sha256;
    j["inputs"] = nlohmann::json::object();
    for (const auto& [p, d] : inputs) j["inputs"][p] = d;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages)
      j["stages"].push_back({{"stage", s.stage}, {"region", s.region}, {"started", s.started}, {"finished", s.finished}});
    j["outputs"] = nlohmann::json::array();
    for (const auto& f : outputs) j["outputs"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    j["diagnostics"] = diagnostics;
    return j;
  }
};

/// Writes files under a root directory and records each one for the manifest.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path root, RunManifest& manifest) : root_(std::move(root)), manifest_(manifest) {}

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path write(const std::filesystem::path& rel, std::string_view content) {
    const auto path = root_ / rel;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + path.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error("write failed: " + path.string());
    }
    const std::string key = rel.generic_string();
    for (auto& f : manifest_.outputs)
      if (f.path == key) {
        f = {key, sha256_hex(content), content.size()};
        return path;
      }
    manifest_.outputs.push_back({key, sha256_hex(content), content.size()});
    return path;
  }

 private:
  std::filesystem::path root_;
  RunManifest& manifest_;
};

}  // namespace pedaccess

#endif  // PEDACCESS_PIPELINE_MANIFEST_HPP
