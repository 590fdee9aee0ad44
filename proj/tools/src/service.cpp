#include "spmrf/tools/service.hpp"

#include <httplib.h>

#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <random>

#include "spmrf/image_io.hpp"
#include "spmrf/tools/inputs.hpp"

namespace spmrf::tools {
namespace {

using nlohmann::json;

constexpr const char* kTimingHeader = "X-Spmrf-Timing";

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw Error(std::string(name) + " is not a number: " + v);
  }
}

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static const char* hex = "0123456789abcdef";
  std::string id(16, '0');
  std::uint64_t v = rng();
  for (auto& c : id) {
    c = hex[v & 15];
    v >>= 4;
  }
  return id;
}

void fail(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.session_cap = env_size("SPMRF_SESSION_CAP", c.session_cap);
  c.max_image_bytes = env_size("SPMRF_MAX_IMAGE_BYTES", c.max_image_bytes);
  return c;
}

std::string SessionStore::insert(std::shared_ptr<Session> session) {
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = new_session_id();
  } while (sessions_.count(id));
  order_.push_front(id);
  sessions_.emplace(id, std::make_pair(std::move(session), order_.begin()));
  while (sessions_.size() > cap_) {
    sessions_.erase(order_.back());
    order_.pop_back();
  }
  return id;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  order_.splice(order_.begin(), order_, it->second.second);
  return it->second.first;
}

bool SessionStore::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return false;
  order_.erase(it->second.second);
  sessions_.erase(it);
  return true;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void Service::mount(httplib::Server& server) {
  server.set_payload_max_length(config_.max_image_bytes);
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Expose-Headers", kTimingHeader}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    } catch (...) {
      fail(res, 500, "unknown error");
    }
  });

  server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"status", "ok"}, {"sessions", store_.size()}}.dump(), "application/json");
  });

  server.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
    std::string image_bytes;
    std::string edge_bytes;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("image")) return fail(res, 400, "multipart upload needs an 'image' part");
      image_bytes = req.get_file_value("image").content;
      if (req.has_file("edges")) edge_bytes = req.get_file_value("edges").content;
    } else {
      image_bytes = req.body;
    }
    if (image_bytes.size() > config_.max_image_bytes) return fail(res, 413, "image too large");
    if (image_bytes.empty()) return fail(res, 400, "empty image upload");

    int superpixels = config_.superpixels;
    if (req.has_param("superpixels")) {
      try {
        superpixels = std::stoi(req.get_param_value("superpixels"));
      } catch (const std::exception&) {
        return fail(res, 400, "superpixels must be an integer");
      }
    }
    auto session = std::make_shared<Session>();
    try {
      session->image = load_rgb_image(image_bytes);
      if (edge_bytes.empty()) {
        session->edges = gradient_edge_map(session->image);
      } else {
        const Raster r = decode_raster(edge_bytes);
        session->edges = BinaryMap(r.geometry, raster_to_bits(r));
        if (!(session->edges.geometry == session->image.geometry)) {
          return fail(res, 400, "edge map size differs from the image");
        }
      }
      const int pixels = static_cast<int>(session->image.geometry.pixel_count());
      if (superpixels < 1) return fail(res, 400, "superpixels must be positive");
      session->partition = slic_superpixels(
          session->image, {std::min(superpixels, pixels), config_.compactness, 10});
    } catch (const Error& e) {
      return fail(res, 400, e.what());
    }
    const auto& g = session->image.geometry;
    const json body{{"width", g.width}, {"height", g.height}, {"superpixels", session->partition.count()}};
    json out = body;
    out["id"] = store_.insert(std::move(session));
    res.status = 201;
    res.set_content(out.dump(), "application/json");
  });

  server.Post("/session/:id/seeds", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = store_.find(req.path_params.at("id"));
    if (!session) return fail(res, 404, "unknown session");
    Seeds increment;
    try {
      increment = parse_seeds_json(req.body);
    } catch (const ParseError& e) {
      return fail(res, 400, e.what());
    }
    if (increment.empty() && !increment.box) return fail(res, 400, "no seeds in request");
    const bool replace = req.has_param("replace") && req.get_param_value("replace") != "0";

    std::lock_guard lock(session->mutex);
    Seeds seeds = replace ? Seeds{} : session->seeds;
    seeds.merge(increment);
    SegmentResult result;
    try {
      seeds.validate(session->image.geometry);
      result = segment_superpixel(session->image, session->edges, seeds, session->partition,
                                  config_.unary);
    } catch (const Error& e) {
      return fail(res, 400, e.what());
    }
    session->seeds = std::move(seeds);
    session->mask = result.mask;
    const json timing{{"unary_ms", result.timings.unary_ms},
                      {"aggregation_ms", result.timings.aggregation_ms},
                      {"solve_ms", result.timings.solve_ms},
                      {"total_ms", result.timings.total_ms},
                      {"energy", result.solve.energy},
                      {"superpixels", result.node_count},
                      {"foreground", result.mask.count()}};
    res.set_header(kTimingHeader, timing.dump());
    res.set_content(mask_png(result.mask), "image/png");
  });

  server.Get("/session/:id/overlay", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = store_.find(req.path_params.at("id"));
    if (!session) return fail(res, 404, "unknown session");
    std::lock_guard lock(session->mutex);
    if (!session->mask) return fail(res, 409, "no segmentation yet");
    res.set_content(mask_png(*session->mask), "image/png");
  });

  server.Get("/session/:id/superpixels", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = store_.find(req.path_params.at("id"));
    if (!session) return fail(res, 404, "unknown session");
    res.set_content(mask_png(superpixel_boundaries(session->partition)), "image/png");
  });

  server.Delete("/session/:id", [this](const httplib::Request& req, httplib::Response& res) {
    if (!store_.erase(req.path_params.at("id"))) return fail(res, 404, "unknown session");
    res.status = 204;
  });
}

int serve(const ServiceConfig& config, const std::string& host, int port) {
  httplib::Server server;
  Service service(config);
  service.mount(server);
  std::cerr << "spmrf: listening on " << host << ':' << port << " (session cap " << config.session_cap
            << ", max image " << config.max_image_bytes << " bytes)\n";
  if (!server.listen(host, port)) {
    std::cerr << "spmrf: cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace spmrf::tools
