#pragma once

#include <atomic>
#include <deque>
#include <functional>
#include <filesystem>
#include <fstream>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "autostroke/protocol.hpp"

namespace autostroke {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::string web_root;        // static UI assets
  std::string document_path;   // loaded per connection, target of "save"
  std::string image_path;      // served at /reference.png
  std::optional<std::string> label_path;
};

/// Static assets over HTTP and one Session per websocket connection, all on
/// one port. Each connection runs on its own thread.
class Server {
 public:
  explicit Server(ServerOptions opts) : opts_(std::move(opts)), acceptor_(ioc_) {
    namespace net = boost::asio;
    image_ = std::make_shared<const ReferenceImage>(load_reference(opts_.image_path, opts_.label_path));
    boost::system::error_code ec;
    const auto addr = net::ip::make_address(opts_.address, ec);
    if (ec) throw Error(ErrorCode::invalid_argument, "bad bind address '" + opts_.address + "'");
    const net::ip::tcp::endpoint ep(addr, opts_.port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw Error(ErrorCode::io, "cannot bind " + opts_.address + ":" + std::to_string(opts_.port) + ": " + ec.message());
  }

  ~Server() {
    boost::system::error_code ec;
    acceptor_.close(ec);
    for (auto& t : connections_)
      if (t.joinable()) t.join();
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  /// Accepts until stop() is called.
  void run() {
    while (!stopped_) {
      // each connection drives its own io_context on its own thread
      auto ctx = std::make_shared<boost::asio::io_context>();
      boost::asio::ip::tcp::socket socket(*ctx);
      boost::system::error_code ec;
      acceptor_.accept(socket, ec);
      if (stopped_) break;
      if (ec) continue;
      connections_.emplace_back([this, ctx, s = std::move(socket)]() mutable { serve(*ctx, std::move(s)); });
    }
  }

  /// Stops run() from any thread. A blocking accept does not notice a
  /// closed acceptor, so the listener is woken with a throwaway connection.
  void stop() {
    if (stopped_.exchange(true)) return;
    boost::system::error_code ec;
    auto ep = acceptor_.local_endpoint(ec);
    if (ec) return;
    if (ep.address().is_unspecified()) ep.address(boost::asio::ip::make_address("127.0.0.1"));
    boost::asio::io_context ioc;
    boost::asio::ip::tcp::socket poke(ioc);
    poke.connect(ep, ec);
  }

 private:
  using Request = boost::beast::http::request<boost::beast::http::string_body>;
  using Response = boost::beast::http::response<boost::beast::http::string_body>;

  void serve(boost::asio::io_context& ctx, boost::asio::ip::tcp::socket socket) {
    namespace http = boost::beast::http;
    namespace websocket = boost::beast::websocket;
    boost::beast::flat_buffer buffer;
    boost::system::error_code ec;
    while (true) {
      Request req;
      http::read(socket, buffer, req, ec);
      if (ec) return;
      if (websocket::is_upgrade(req)) {
        run_websocket(ctx, std::move(socket), std::move(req));
        return;
      }
      Response res = static_response(req);
      http::write(socket, res, ec);
      if (ec || !req.keep_alive()) break;
    }
    socket.shutdown(boost::asio::ip::tcp::socket::shutdown_send, ec);
  }

  static std::string mime_type(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".png") return "image/png";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    return "application/octet-stream";
  }

  Response static_response(const Request& req) const {
    namespace http = boost::beast::http;
    Response res;
    res.version(req.version());
    res.keep_alive(req.keep_alive());
    auto fail = [&](http::status s, const std::string& msg) {
      res.result(s);
      res.set(http::field::content_type, "text/plain");
      res.body() = msg;
      res.prepare_payload();
      return res;
    };
    if (req.method() != http::verb::get) return fail(http::status::method_not_allowed, "GET only\n");
    std::string target(req.target());
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos)
      return fail(http::status::bad_request, "bad path\n");
    std::filesystem::path file;
    if (target == "/reference.png") file = opts_.image_path;
    else file = std::filesystem::path(opts_.web_root) / (target == "/" ? "index.html" : target.substr(1));
    std::ifstream in(file, std::ios::binary);
    if (!in) return fail(http::status::not_found, "not found\n");
    std::ostringstream body;
    body << in.rdbuf();
    res.result(http::status::ok);
    res.set(http::field::content_type, mime_type(file));
    res.body() = body.str();
    res.prepare_payload();
    return res;
  }

  /// Websocket session. Reads and writes are asynchronous and all run on
  /// this thread through `ctx`; pipeline pushes from the session worker are
  /// posted into it, so the stream is never touched concurrently.
  void run_websocket(boost::asio::io_context& ctx, boost::asio::ip::tcp::socket socket, Request req) {
    namespace net = boost::asio;
    namespace websocket = boost::beast::websocket;
    websocket::stream<net::ip::tcp::socket> ws(std::move(socket));
    boost::system::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);

    std::deque<std::string> outbox;
    bool writing = false;
    bool broken = false;
    std::function<void()> flush = [&] {
      if (writing || broken || outbox.empty()) return;
      writing = true;
      ws.async_write(net::buffer(outbox.front()), [&](boost::system::error_code wec, std::size_t) {
        writing = false;
        outbox.pop_front();
        if (wec) broken = true;
        flush();
      });
    };
    auto enqueue = [&](std::string frame) {
      outbox.push_back(std::move(frame));
      flush();
    };
    auto push = [&](std::string frame) {
      net::post(ctx, [&enqueue, f = std::move(frame)]() mutable { enqueue(std::move(f)); });
    };

    std::optional<Session> session;
    std::optional<ProtocolHandler> handler;
    try {
      Document doc = opts_.document_path.empty() || !std::filesystem::exists(opts_.document_path)
                         ? Document{}
                         : load_document(opts_.document_path);
      session.emplace(std::move(doc), image_);
      std::optional<std::string> save_path;
      if (!opts_.document_path.empty()) save_path = opts_.document_path;
      handler.emplace(*session, push, save_path);
      enqueue(handler->hello().dump());
    } catch (const Error& e) {
      enqueue(json{{"type", "error"}, {"seq", nullptr}, {"code", to_string(e.code())}, {"message", e.what()}}.dump());
    }

    boost::beast::flat_buffer buffer;
    std::function<void()> read = [&] {
      ws.async_read(buffer, [&](boost::system::error_code rec, std::size_t) {
        if (rec) return;
        const std::string text = boost::beast::buffers_to_string(buffer.data());
        buffer.consume(buffer.size());
        if (handler)
          for (auto& reply : handler->handle(text)) enqueue(std::move(reply));
        read();
      });
    };
    if (handler) read();
    ctx.run();

    // detach the listener before the queue it posts into goes away
    handler.reset();
    session.reset();
    if (ws.is_open()) ws.close(websocket::close_code::normal, ec);
  }

  ServerOptions opts_;
  boost::asio::io_context ioc_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::shared_ptr<const ReferenceImage> image_;
  std::atomic<bool> stopped_{false};
  std::list<std::thread> connections_;
};

}  // namespace autostroke
