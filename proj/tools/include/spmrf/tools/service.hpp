#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "spmrf/partition.hpp"
#include "spmrf/segmentation.hpp"

namespace httplib {
class Server;
}

namespace spmrf::tools {

struct ServiceConfig {
  std::size_t session_cap = 16;
  std::size_t max_image_bytes = 32u << 20;
  int superpixels = 800;
  double compactness = 10.0;
  UnaryParams unary;

  /// Defaults overridden by SPMRF_SESSION_CAP and SPMRF_MAX_IMAGE_BYTES.
  [[nodiscard]] static ServiceConfig from_env();
};

struct Session {
  std::mutex mutex;  // held for the whole of a solve
  RgbImage image;
  EdgeMap edges;
  SuperpixelPartition partition;
  Seeds seeds;
  std::optional<Mask> mask;
};

/// In-memory sessions with least-recently-used eviction.
class SessionStore {
 public:
  explicit SessionStore(std::size_t cap) : cap_(cap < 1 ? 1 : cap) {}

  std::string insert(std::shared_ptr<Session> session);
  [[nodiscard]] std::shared_ptr<Session> find(const std::string& id);
  bool erase(const std::string& id);
  [[nodiscard]] std::size_t size() const;

 private:
  using Lru = std::list<std::string>;
  std::size_t cap_;
  mutable std::mutex mutex_;
  Lru order_;  // most recent first
  std::unordered_map<std::string, std::pair<std::shared_ptr<Session>, Lru::iterator>> sessions_;
};

/// Routes:
///   POST   /session                   image body (or multipart "image" and
///                                     optional "edges"); ?superpixels=N
///   POST   /session/{id}/seeds        seed JSON; merged into the session
///                                     (?replace=1 replaces); mask PNG back,
///                                     timings in the X-Spmrf-Timing header
///   GET    /session/{id}/overlay      latest mask PNG
///   GET    /session/{id}/superpixels  superpixel boundary PNG
///   DELETE /session/{id}
///   GET    /health
class Service {
 public:
  explicit Service(ServiceConfig config) : config_(config), store_(config.session_cap) {}

  void mount(httplib::Server& server);
  [[nodiscard]] SessionStore& store() { return store_; }
  [[nodiscard]] const ServiceConfig& config() const { return config_; }

 private:
  ServiceConfig config_;
  SessionStore store_;
};

/// Blocks serving on host:port until the process is stopped.
int serve(const ServiceConfig& config, const std::string& host, int port);

}  // namespace spmrf::tools
