#include "zoomwrite/frame_protocol.hpp"

#include <boost/asio.hpp>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "zoomwrite/error.hpp"

namespace zw {
namespace {

using nlohmann::json;

std::string message(std::string_view verb, const json& payload) {
  return std::string(verb) + " " + payload.dump();
}

std::string error_line(const std::string& what) { return message("error", json{{"message", what}}); }

json params_json(const DynamicsParams& p) {
  return json{{"rate", p.max_rate_bits_per_sec},
              {"crosshair_x", p.crosshair_x},
              {"min_view_width", p.min_view_width},
              {"frame_dt_cap", p.frame_dt_cap}};
}

}  // namespace

FrameServer::FrameServer(const PpmModel& model, Alphabet alphabet, DynamicsParams params)
    : model_(model), alphabet_(std::move(alphabet)), params_(params) {
  if (model_.alphabet_size() != alphabet_.size()) throw ConfigError("model and alphabet sizes differ");
  params_.validate();
  restart({});
}

FrameServer::~FrameServer() = default;

void FrameServer::restart(const SymbolSeq& seed) {
  session_.reset();
  session_ = std::make_unique<Session>(model_, params_, seed);
}

std::string FrameServer::welcome() const {
  return message("welcome", json{{"protocol_version", kProtocolVersion},
                                 {"alphabet", alphabet_.glyphs()},
                                 {"separator", alphabet_.separator()},
                                 {"params", params_json(params_)}});
}

std::string FrameServer::render(const FrameResult& frame) const {
  json boxes = json::array();
  for (const Box& b : frame.boxes) {
    boxes.push_back({{"x0", b.x0},
                     {"y0", b.y0},
                     {"x1", b.x1},
                     {"y1", b.y1},
                     {"glyph", alphabet_.glyph(b.symbol)},
                     {"depth", b.depth}});
  }
  return message("render",
                 json{{"boxes", std::move(boxes)},
                      {"committed", alphabet_.render(frame.committed)},
                      {"delta", {{"removed", frame.delta.removed}, {"added", alphabet_.render(frame.delta.added)}}},
                      {"metrics",
                       {{"elapsed_s", frame.metrics.elapsed_s},
                        {"chars", frame.metrics.committed_chars},
                        {"wpm", frame.metrics.words_per_min()}}},
                      {"params", params_json(params_)}});
}

FrameServer::Reply FrameServer::handle(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  const auto space = line.find(' ');
  const std::string verb(line.substr(0, space));
  json payload = json::object();
  if (space != std::string_view::npos) {
    payload = json::parse(line.substr(space + 1), nullptr, false);
    if (payload.is_discarded() || !payload.is_object()) {
      return {{error_line("payload of '" + verb + "' is not a JSON object")}, !greeted_};
    }
  }

  if (!greeted_) {
    if (verb != "hello") return {{error_line("expected hello")}, true};
    const int version = payload.value("protocol_version", -1);
    if (version != kProtocolVersion) {
      return {{error_line("protocol version mismatch: server speaks " + std::to_string(kProtocolVersion))}, true};
    }
    greeted_ = true;
    return {{welcome()}, false};
  }

  try {
    if (verb == "frame") {
      const Pointer p{payload.value("x", params_.crosshair_x), payload.value("y", 0.5)};
      const double dt = payload.value("dt", 0.0);
      return {{render(session_->step(p, dt))}, false};
    }
    if (verb == "config") {
      DynamicsParams next = params_;
      next.max_rate_bits_per_sec = payload.value("rate", next.max_rate_bits_per_sec);
      next.crosshair_x = payload.value("crosshair_x", next.crosshair_x);
      session_->set_params(next);
      params_ = next;
      return {};
    }
    if (verb == "reset") {
      restart(normalize_text(payload.value("seed_context", std::string()), alphabet_));
      return {};
    }
    if (verb == "bye") return {{message("bye", json::object())}, true};
    if (verb == "hello") return {{error_line("already greeted")}, false};
  } catch (const json::exception& e) {
    return {{error_line(std::string("bad field: ") + e.what())}, false};
  } catch (const Error& e) {
    return {{error_line(e.what())}, false};
  }
  return {{error_line("unknown message '" + verb + "'")}, false};
}

void serve_stream(FrameServer& server, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const FrameServer::Reply reply = server.handle(line);
    for (const std::string& l : reply.lines) out << l << '\n';
    out.flush();
    if (reply.close) return;
  }
}

void serve_tcp(const PpmModel& model, const Alphabet& alphabet, const DynamicsParams& params,
               unsigned short port, std::ostream& log, std::size_t max_connections) {
  using boost::asio::ip::tcp;
  boost::asio::io_context io;
  tcp::acceptor acceptor(io, tcp::endpoint(boost::asio::ip::make_address("127.0.0.1"), port));
  log << "listening 127.0.0.1:" << acceptor.local_endpoint().port() << std::endl;
  for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
    tcp::iostream stream;
    acceptor.accept(stream.socket());
    FrameServer server(model, alphabet, params);
    serve_stream(server, stream, stream);
  }
}

}  // namespace zw
