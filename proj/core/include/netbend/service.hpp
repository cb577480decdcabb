#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "netbend/engine.hpp"

namespace netbend {

inline constexpr std::uint16_t kDefaultPort = 8639;

struct ServiceOptions {
  std::string address = "0.0.0.0";
  /// 0 picks an ephemeral port; see RenderService::port().
  std::uint16_t port = kDefaultPort;
  /// Render workers; 0 means one per hardware thread.
  std::size_t render_threads = 0;
  std::size_t io_threads = 1;
  /// Stop on SIGINT / SIGTERM.
  bool handle_signals = false;
};

class ServiceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// HTTP + WebSocket front end over one Engine.
///
///   GET  /api/model        graph description (JSON array)
///   GET  /api/activations  kind + schema catalog
///   POST /api/render       RenderRequest JSON -> image bytes;
///                          400 + ValidationReport, 422 on a malformed body
///   WS   /ws               {seq, patches, seed[, format]} ->
///                          {seq, format, image (base64), render_ms} or
///                          {seq, error}
///
/// Each live session renders at most one request at a time; a newer request
/// replaces one still waiting (latest wins). Replies never go backwards in
/// seq, and a request whose seq is below the last one accepted is dropped.
class RenderService {
 public:
  RenderService(std::shared_ptr<const Engine> engine, ServiceOptions options);
  ~RenderService();

  RenderService(const RenderService&) = delete;
  RenderService& operator=(const RenderService&) = delete;

  /// Binds, listens and starts the worker threads. Throws ServiceError when
  /// the address cannot be bound.
  void start();
  /// Blocks until stop() (or a handled signal).
  void wait();
  void stop();

  std::uint16_t port() const noexcept;
  /// Renders completed so far, across all endpoints.
  std::uint64_t render_count() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace netbend
