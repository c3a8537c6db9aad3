#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

// Downloads matrices from the public sparse matrix collection as
// {group}/{name}.tar.gz archives, extracts the .mtx member, and keeps an
// on-disk cache. The HTTP layer sits behind an interface so tests can
// inject canned responses and offline behavior is fully checkable.

namespace mps {

class FetchError : public std::runtime_error {
 public:
  enum class Kind {
    Network,      // transport failure or non-200 status
    UnknownName,  // matrix name has no known group and none was given
    Archive,      // gzip/tar damage or missing .mtx member
    Io,           // local filesystem failure
    OfflineMiss,  // offline mode and the matrix is not cached
  };

  FetchError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Absolute https:// URL. Throws FetchError(Kind::Network) on transport
  // failure; HTTP-level errors come back as the status code.
  virtual HttpResponse get(const std::string& url) = 0;
};

// TLS transport; null if the build has no TLS support.
std::unique_ptr<HttpTransport> make_https_transport();

struct FetchOptions {
  std::filesystem::path cache_dir;
  bool offline = false;
  std::string url_template = "https://sparse.tamu.edu/MM/{group}/{name}.tar.gz";
  HttpTransport* transport = nullptr;  // null selects make_https_transport()
};

// Group for the collection matrices this project's experiment configs use.
std::optional<std::string> collection_group(const std::string& name);

// `name` is either a bare matrix name with a known group or "Group/name".
// Returns the path of the cached .mtx; a cache hit performs no network
// operation.
std::filesystem::path fetch_matrix(const std::string& name, const FetchOptions& options);

namespace detail {
// zlib inflate of a gzip stream; throws FetchError(Kind::Archive).
std::string gunzip(const std::string& gz);
// Returns the contents of the first regular member whose path ends with
// `suffix`, or nullopt. Plain ustar/pax layout, no compression.
std::optional<std::string> tar_member(const std::string& tar, const std::string& suffix);
}  // namespace detail

}  // namespace mps
