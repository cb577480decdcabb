#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

namespace netclient {

struct HttpResponse {
  unsigned status = 0;
  std::string content_type;
  std::string body;
};

// One request per connection against 127.0.0.1.
HttpResponse get(std::uint16_t port, const std::string& target);
HttpResponse post(std::uint16_t port, const std::string& target, const std::string& body,
                  const std::string& content_type = "application/json");

// Blocking WebSocket client for the live channel.
class WsClient {
 public:
  WsClient(std::uint16_t port, const std::string& target = "/ws");
  ~WsClient();
  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  void send(const std::string& text);
  // Throws std::runtime_error when nothing arrives within the timeout.
  std::string receive(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace netclient
