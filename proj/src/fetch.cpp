#include "mps/fetch.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>
#include <map>
#include <random>

#ifdef MPSPARSE_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace fs = std::filesystem;

namespace mps {

namespace {

#ifdef MPSPARSE_HAVE_OPENSSL
class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse get(const std::string& url) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw FetchError(FetchError::Kind::Network, "malformed URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string host = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client client(host);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    auto res = client.Get(path);
    if (!res)
      throw FetchError(FetchError::Kind::Network,
                       "request to " + url + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
  }
};
#endif

const std::map<std::string, std::string>& builtin_groups() {
  static const std::map<std::string, std::string> groups = {
      {"tub100", "Bai"},     {"tub1000", "Bai"},  {"qc324", "Bai"},
      {"qc2534", "Bai"},     {"dwg961a", "Bai"},  {"dwg961b", "Bai"},
      {"mhd1280a", "Bai"},   {"mhd1280b", "Bai"}, {"olm1000", "Bai"},
      {"nd3k", "ND"},        {"nd6k", "ND"},      {"nd12k", "ND"},
      {"nd24k", "ND"},       {"young1c", "HB"},   {"young2c", "HB"},
      {"young3c", "HB"},     {"young4c", "HB"},   {"mplate", "Cote2"},
      {"aft02", "Okunbor"},  {"conf5_0-4x4-10", "QCD"},
      {"conf5_0-4x4-14", "QCD"}, {"conf5_0-4x4-18", "QCD"},
      {"conf5_0-4x4-22", "QCD"}, {"conf5_0-4x4-26", "QCD"},
      {"conf6_0-4x4-20", "QCD"}, {"conf6_0-4x4-30", "QCD"},
  };
  return groups;
}

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
  auto pos = tmpl.find(key);
  while (pos != std::string::npos) {
    tmpl.replace(pos, key.size(), value);
    pos = tmpl.find(key, pos + value.size());
  }
  return tmpl;
}

void write_file_atomic(const fs::path& target, const std::string& data) {
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  static std::mt19937_64 rng{std::random_device{}()};
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
      fs::remove(tmp, ec);
      throw FetchError(FetchError::Kind::Io, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw FetchError(FetchError::Kind::Io,
                     "cannot move temporary file into " + target.string());
  }
}

std::uint64_t octal_field(const char* p, std::size_t len) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    char c = p[i];
    if (c == '\0' || c == ' ') break;
    if (c < '0' || c > '7') throw FetchError(FetchError::Kind::Archive, "bad tar header");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

std::unique_ptr<HttpTransport> make_https_transport() {
#ifdef MPSPARSE_HAVE_OPENSSL
  return std::make_unique<HttplibTransport>();
#else
  return nullptr;
#endif
}

std::optional<std::string> collection_group(const std::string& name) {
  auto it = builtin_groups().find(name);
  if (it == builtin_groups().end()) return std::nullopt;
  return it->second;
}

namespace detail {

std::string gunzip(const std::string& gz) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  // 15 window bits + 16 selects gzip framing
  if (inflateInit2(&zs, 15 + 16) != Z_OK)
    throw FetchError(FetchError::Kind::Archive, "zlib initialization failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(gz.data()));
  zs.avail_in = static_cast<uInt>(gz.size());
  std::string out;
  std::array<char, 1 << 16> buf;
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf.data());
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FetchError(FetchError::Kind::Archive,
                       std::string("corrupt gzip stream (") +
                           (zs.msg ? zs.msg : zError(rc)) + ")");
    }
    out.append(buf.data(), buf.size() - zs.avail_out);
  } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  if (rc != Z_STREAM_END)
    throw FetchError(FetchError::Kind::Archive, "truncated gzip stream");
  return out;
}

std::optional<std::string> tar_member(const std::string& tar, const std::string& suffix) {
  constexpr std::size_t kBlock = 512;
  std::size_t off = 0;
  while (off + kBlock <= tar.size()) {
    const char* hdr = tar.data() + off;
    bool all_zero = true;
    for (std::size_t i = 0; i < kBlock && all_zero; ++i) all_zero = hdr[i] == '\0';
    if (all_zero) break;  // end-of-archive marker
    std::string name(hdr, strnlen(hdr, 100));
    if (std::memcmp(hdr + 257, "ustar", 5) == 0) {
      std::string prefix(hdr + 345, strnlen(hdr + 345, 155));
      if (!prefix.empty()) name = prefix + "/" + name;
    }
    std::uint64_t size = octal_field(hdr + 124, 12);
    char type = hdr[156];
    off += kBlock;
    if (off + size > tar.size())
      throw FetchError(FetchError::Kind::Archive, "truncated tar archive");
    if ((type == '0' || type == '\0') && name.size() >= suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      return tar.substr(off, size);
    off += (size + kBlock - 1) / kBlock * kBlock;
  }
  return std::nullopt;
}

}  // namespace detail

std::filesystem::path fetch_matrix(const std::string& name, const FetchOptions& options) {
  if (options.cache_dir.empty())
    throw FetchError(FetchError::Kind::Io, "cache directory is not set");

  std::string group, bare = name;
  if (auto slash = name.find('/'); slash != std::string::npos) {
    group = name.substr(0, slash);
    bare = name.substr(slash + 1);
    if (group.empty() || bare.empty() || bare.find('/') != std::string::npos)
      throw FetchError(FetchError::Kind::UnknownName,
                       "expected \"name\" or \"Group/name\", got \"" + name + "\"");
  } else {
    auto known = collection_group(bare);
    if (!known)
      throw FetchError(FetchError::Kind::UnknownName,
                       "no known collection group for \"" + bare +
                           "\"; use the explicit \"Group/name\" form");
    group = *known;
  }

  fs::path target = options.cache_dir / group / (bare + ".mtx");
  std::error_code ec;
  if (fs::exists(target, ec)) return target;
  if (options.offline)
    throw FetchError(FetchError::Kind::OfflineMiss,
                     "offline and \"" + group + "/" + bare + "\" is not cached at " +
                         target.string());

  HttpTransport* transport = options.transport;
  std::unique_ptr<HttpTransport> owned;
  if (!transport) {
    owned = make_https_transport();
    transport = owned.get();
    if (!transport)
      throw FetchError(FetchError::Kind::Network,
                       "this build has no TLS transport; pass a cached matrix or a "
                       "custom transport");
  }

  std::string url = substitute(options.url_template, "{group}", group);
  url = substitute(url, "{name}", bare);
  auto response = transport->get(url);
  if (response.status != 200)
    throw FetchError(FetchError::Kind::Network,
                     url + " returned HTTP " + std::to_string(response.status));

  std::string tar = detail::gunzip(response.body);
  auto mtx = detail::tar_member(tar, "/" + bare + ".mtx");
  if (!mtx) mtx = detail::tar_member(tar, bare + ".mtx");
  if (!mtx)
    throw FetchError(FetchError::Kind::Archive,
                     "archive for " + group + "/" + bare + " has no " + bare + ".mtx");

  write_file_atomic(target, *mtx);
  return target;
}

}  // namespace mps
