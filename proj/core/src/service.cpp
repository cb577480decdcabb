#include "netbend/service.hpp"

#include <atomic>
#include <deque>
#include <optional>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "netbend/activation.hpp"
#include "netbend/base64.hpp"

namespace netbend {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

// State shared by every session; immutable apart from the counters.
struct Shared {
  std::shared_ptr<const Engine> engine;
  net::thread_pool* render_pool;
  std::string model_json;
  std::string catalog_json;
  std::atomic<std::uint64_t> renders{0};

  RenderOutcome render(const RenderRequest& request) {
    RenderOutcome outcome = engine->render(request);
    if (outcome.ok()) renders.fetch_add(1, std::memory_order_relaxed);
    return outcome;
  }
};

json format_error_json(const std::string& code, const std::string& message) {
  return {{"errors", json::array({{{"code", code}, {"message", message}}})}, {"warnings", json::array()}};
}

http::response<http::string_body> make_response(unsigned version, bool keep_alive, http::status status,
                                                std::string_view type, std::string body) {
  http::response<http::string_body> res{status, version};
  res.set(http::field::server, "netbend");
  res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(keep_alive);
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

// ---------------------------------------------------------------------------
// Live channel

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<Shared> shared)
      : ws_(std::move(socket)), shared_(std::move(shared)) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  struct Item {
    std::uint64_t seq = 0;
    std::optional<RenderRequest> request;  // nullopt: `reply` is a ready error
    std::string reply;
  };

  void on_accept(beast::error_code ec) {
    if (ec) return;
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    accept_message(text);
    pump();
    do_read();
  }

  void accept_message(const std::string& text) {
    json msg = json::parse(text, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) {
      queue_.push_back({0, std::nullopt, error_reply(json(nullptr), format_error_json("parse_error", "message is not a JSON object"))});
      return;
    }
    auto seq_it = msg.find("seq");
    if (seq_it == msg.end() || !seq_it->is_number_integer() || (!seq_it->is_number_unsigned() && seq_it->get<std::int64_t>() < 0)) {
      queue_.push_back({0, std::nullopt, error_reply(json(nullptr), format_error_json("bad_type", "seq must be a non-negative integer"))});
      return;
    }
    const std::uint64_t seq = seq_it->get<std::uint64_t>();
    if (last_seq_ && seq < *last_seq_) return;  // stale
    last_seq_ = seq;
    msg.erase("seq");

    RenderRequest request;
    try {
      request = parse_render_request(msg);
    } catch (const PatchFormatError& e) {
      queue_.push_back({seq, std::nullopt, error_reply(seq, format_error_json(e.code(), e.what()))});
      return;
    }
    if (ValidationReport report = validate(request.patches, shared_->engine->graph()); !report.ok()) {
      queue_.push_back({seq, std::nullopt, error_reply(seq, report_to_json(report))});
      return;
    }
    // Latest wins: a waiting render is superseded, queued errors stay.
    std::erase_if(queue_, [](const Item& item) { return item.request.has_value(); });
    queue_.push_back({seq, std::move(request), {}});
  }

  static std::string error_reply(const json& seq, const json& report) {
    return json{{"seq", seq}, {"error", report}}.dump();
  }

  void pump() {
    while (!rendering_ && !queue_.empty()) {
      Item item = std::move(queue_.front());
      queue_.pop_front();
      if (!item.request) {
        send(std::move(item.reply));
        continue;
      }
      rendering_ = true;
      net::post(*shared_->render_pool, [self = shared_from_this(), seq = item.seq, req = std::move(*item.request)] {
        RenderOutcome outcome = self->shared_->render(req);
        net::post(self->ws_.get_executor(), [self, seq, outcome = std::move(outcome)] {
          self->rendering_ = false;
          json reply;
          if (outcome.ok()) {
            reply = {{"seq", seq},
                     {"format", format_name(outcome.format)},
                     {"image", base64_encode(outcome.payload)},
                     {"render_ms", outcome.render_ms}};
          } else {
            reply = {{"seq", seq}, {"error", report_to_json(outcome.report)}};
          }
          self->send(reply.dump());
          self->pump();
        });
      });
    }
  }

  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (!writing_) do_write();
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    outbox_.pop_front();
    if (ec) {
      outbox_.clear();
      writing_ = false;
      return;
    }
    if (outbox_.empty()) {
      writing_ = false;
    } else {
      do_write();
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::shared_ptr<Shared> shared_;
  std::deque<Item> queue_;
  std::deque<std::string> outbox_;
  std::optional<std::uint64_t> last_seq_;
  bool rendering_ = false;
  bool writing_ = false;
};

// ---------------------------------------------------------------------------
// Plain HTTP

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<Shared> shared)
      : stream_(std::move(socket)), shared_(std::move(shared)) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(8 * 1024 * 1024);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    http::request<http::string_body> req = parser_->release();

    if (websocket::is_upgrade(req)) {
      if (req.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), shared_)->run(std::move(req));
        return;
      }
      write(make_response(req.version(), false, http::status::not_found, "text/plain", "no websocket here\n"));
      return;
    }

    const unsigned version = req.version();
    const bool keep_alive = req.keep_alive();
    const std::string target(req.target());

    if (target == "/api/render") {
      if (req.method() != http::verb::post) {
        write(make_response(version, keep_alive, http::status::method_not_allowed, "text/plain", "POST only\n"));
        return;
      }
      net::post(*shared_->render_pool, [self = shared_from_this(), body = std::move(req.body()), version, keep_alive] {
        auto res = self->render(body, version, keep_alive);
        net::post(self->stream_.get_executor(), [self, res = std::move(res)]() mutable { self->write(std::move(res)); });
      });
      return;
    }
    if (target == "/api/model" || target == "/api/activations") {
      if (req.method() != http::verb::get) {
        write(make_response(version, keep_alive, http::status::method_not_allowed, "text/plain", "GET only\n"));
        return;
      }
      write(make_response(version, keep_alive, http::status::ok, "application/json",
                          target == "/api/model" ? shared_->model_json : shared_->catalog_json));
      return;
    }
    write(make_response(version, keep_alive, http::status::not_found, "text/plain", "not found\n"));
  }

  http::response<http::string_body> render(const std::string& body, unsigned version, bool keep_alive) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
      return make_response(version, keep_alive, http::status::unprocessable_entity, "application/json",
                           format_error_json("parse_error", "request body is not valid JSON").dump());
    }
    RenderRequest request;
    try {
      request = parse_render_request(doc);
    } catch (const PatchFormatError& e) {
      return make_response(version, keep_alive, http::status::unprocessable_entity, "application/json",
                           format_error_json(e.code(), e.what()).dump());
    }
    RenderOutcome outcome = shared_->render(request);
    if (!outcome.ok()) {
      return make_response(version, keep_alive, http::status::bad_request, "application/json",
                           report_to_json(outcome.report).dump());
    }
    auto res = make_response(version, keep_alive, http::status::ok, content_type(outcome.format),
                             std::move(outcome.payload));
    res.set("X-Render-Ms", std::to_string(outcome.render_ms));
    res.prepare_payload();
    return res;
  }

  void write(http::response<http::string_body> res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (sp->need_eof()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::shared_ptr<Shared> shared_;
};

}  // namespace

// ---------------------------------------------------------------------------

struct RenderService::Impl {
  ServiceOptions options;
  net::io_context ioc;
  net::thread_pool render_pool;
  tcp::acceptor acceptor;
  std::optional<net::signal_set> signals;
  std::shared_ptr<Shared> shared;
  std::vector<std::thread> io_threads;
  std::atomic<bool> running{false};
  std::uint16_t bound_port = 0;

  Impl(std::shared_ptr<const Engine> engine, ServiceOptions opts)
      : options(std::move(opts)),
        ioc(static_cast<int>(std::max<std::size_t>(1, options.io_threads))),
        render_pool(options.render_threads ? options.render_threads
                                           : std::max(1u, std::thread::hardware_concurrency())),
        acceptor(net::make_strand(ioc)),
        shared(std::make_shared<Shared>()) {
    shared->engine = std::move(engine);
    shared->render_pool = &render_pool;
    shared->model_json = graph_to_json(shared->engine->graph()).dump();
    shared->catalog_json = activation_catalog().dump();
  }

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec == net::error::operation_aborted) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), shared)->run();
      do_accept();
    });
  }
};

RenderService::RenderService(std::shared_ptr<const Engine> engine, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(engine), std::move(options))) {}

RenderService::~RenderService() { stop(); }

void RenderService::start() {
  auto& im = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(im.options.address, ec);
  if (ec) throw ServiceError("invalid listen address '" + im.options.address + "'");
  const tcp::endpoint endpoint{address, im.options.port};
  auto fail = [&](const char* what) {
    throw ServiceError(std::string("cannot ") + what + " " + im.options.address + ":" +
                       std::to_string(im.options.port) + ": " + ec.message());
  };
  im.acceptor.open(endpoint.protocol(), ec);
  if (ec) fail("open socket for");
  im.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  im.acceptor.bind(endpoint, ec);
  if (ec) fail("bind");
  im.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) fail("listen on");
  im.bound_port = im.acceptor.local_endpoint().port();

  if (im.options.handle_signals) {
    im.signals.emplace(im.ioc, SIGINT, SIGTERM);
    im.signals->async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  }
  im.do_accept();
  im.running = true;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, im.options.io_threads); ++i) {
    im.io_threads.emplace_back([&im] { im.ioc.run(); });
  }
}

void RenderService::wait() {
  for (auto& t : impl_->io_threads) {
    if (t.joinable()) t.join();
  }
}

void RenderService::stop() {
  if (!impl_ || !impl_->running.exchange(false)) return;
  impl_->ioc.stop();
  wait();
  impl_->render_pool.join();
}

std::uint16_t RenderService::port() const noexcept { return impl_->bound_port; }

std::uint64_t RenderService::render_count() const noexcept { return impl_->shared->renders.load(); }

}  // namespace netbend
