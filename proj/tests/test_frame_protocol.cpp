#include <doctest.h>

#include <boost/asio.hpp>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "zoomwrite/frame_protocol.hpp"

using namespace zw;
using nlohmann::json;

namespace {

std::pair<std::string, json> parse(const std::string& line) {
  const auto space = line.find(' ');
  return {line.substr(0, space), space == std::string::npos ? json::object() : json::parse(line.substr(space + 1))};
}

}  // namespace

TEST_CASE("handshake") {
  FrameServer s(test::trained(5), test::alphabet27(), DynamicsParams{});
  const auto r = s.handle(R"(hello {"protocol_version":1})");
  REQUIRE(r.lines.size() == 1);
  CHECK_FALSE(r.close);
  const auto [verb, body] = parse(r.lines[0]);
  CHECK(verb == "welcome");
  CHECK(body["protocol_version"] == 1);
  CHECK(body["alphabet"].size() == 27);
  CHECK(body["alphabet"][26] == " ");
  CHECK(body["separator"] == 26);
  CHECK(body["params"]["rate"] == 8.0);
}

TEST_CASE("version mismatch and early messages close the connection") {
  {
    FrameServer s(test::trained(5), test::alphabet27(), DynamicsParams{});
    const auto r = s.handle(R"(hello {"protocol_version":2})");
    CHECK(r.close);
    CHECK(parse(r.lines.at(0)).first == "error");
  }
  {
    FrameServer s(test::trained(5), test::alphabet27(), DynamicsParams{});
    const auto r = s.handle(R"(frame {"x":1,"y":0.5,"dt":0.03})");
    CHECK(r.close);
    CHECK(parse(r.lines.at(0)).second["message"].is_string());
  }
}

TEST_CASE("frames render in order and config is echoed") {
  FrameServer s(test::trained(5), test::alphabet27(), DynamicsParams{});
  s.handle(R"(hello {"protocol_version":1})");

  auto r = s.handle(R"(frame {"x":0.5,"y":0.5,"dt":0.03})");
  REQUIRE(r.lines.size() == 1);
  auto [verb, body] = parse(r.lines[0]);
  CHECK(verb == "render");
  CHECK(body["committed"] == "");
  CHECK(body["boxes"].size() >= 27);
  for (const auto& b : body["boxes"]) {
    CHECK(b["x1"] == 1.0);
    CHECK(b["y0"].get<double>() >= 0.0);
    CHECK(b["y1"].get<double>() <= 1.0);
    CHECK(b["glyph"].get<std::string>().size() == 1);
  }

  CHECK(s.handle(R"(config {"rate":5,"crosshair_x":0.4})").lines.empty());
  std::tie(verb, body) = parse(s.handle(R"(frame {"x":0.5,"y":0.5,"dt":0.03})").lines.at(0));
  CHECK(body["params"]["rate"] == 5.0);
  CHECK(body["params"]["crosshair_x"] == 0.4);

  // Steer into a letter until it commits.
  std::string committed;
  for (int i = 0; i < 300 && committed.empty(); ++i) {
    std::tie(verb, body) = parse(s.handle(R"(frame {"x":1,"y":0.3,"dt":0.033})").lines.at(0));
    committed = body["committed"];
  }
  CHECK(committed.size() >= 1);
  CHECK(body["delta"]["added"].get<std::string>().size() >= 1);
  CHECK(body["metrics"]["chars"].get<int>() == static_cast<int>(committed.size()));

  // Bad values leave the connection open.
  auto bad = s.handle(R"(config {"rate":-3})");
  CHECK(parse(bad.lines.at(0)).first == "error");
  CHECK_FALSE(bad.close);
  CHECK(parse(s.handle("dance {}").lines.at(0)).first == "error");
  CHECK(parse(s.handle("frame [1,2]").lines.at(0)).first == "error");

  CHECK(s.handle(R"(reset {"seed_context":"the "})").lines.empty());
  std::tie(verb, body) = parse(s.handle(R"(frame {"x":0.5,"y":0.5,"dt":0.03})").lines.at(0));
  CHECK(body["committed"] == "");

  const auto bye = s.handle("bye");
  CHECK(bye.close);
  CHECK(bye.lines.at(0) == "bye {}");
}

TEST_CASE("the server does not change the caller's model") {
  PpmModel m = test::trained(5);
  const auto before = m.snapshot();
  FrameServer s(m, test::alphabet27(), DynamicsParams{});
  s.handle(R"(hello {"protocol_version":1})");
  for (int i = 0; i < 200; ++i) s.handle(R"(frame {"x":1,"y":0.7,"dt":0.033})");
  CHECK(m.snapshot() == before);
}

TEST_CASE("stream transport") {
  FrameServer s(test::trained(5), test::alphabet27(), DynamicsParams{});
  std::istringstream in("hello {\"protocol_version\":1}\n\nframe {\"x\":0.5,\"y\":0.5,\"dt\":0.03}\nbye\nframe {}\n");
  std::ostringstream out;
  serve_stream(s, in, out);
  std::istringstream lines(out.str());
  std::vector<std::string> got;
  for (std::string l; std::getline(lines, l);) got.push_back(parse(l).first);
  CHECK(got == std::vector<std::string>{"welcome", "render", "bye"});
}

TEST_CASE("tcp transport") {
  unsigned short port = 0;
  {
    boost::asio::io_context io;
    boost::asio::ip::tcp::acceptor probe(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
    port = probe.local_endpoint().port();
  }
  std::ostringstream log;
  std::thread t([&] { serve_tcp(test::trained(5), test::alphabet27(), DynamicsParams{}, port, log, 1); });

  boost::asio::ip::tcp::iostream client;
  for (int i = 0; i < 200; ++i) {
    client.clear();
    client.connect("127.0.0.1", std::to_string(port));
    if (client) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  REQUIRE(client);
  client << "hello {\"protocol_version\":1}\n" << std::flush;
  std::string line;
  std::getline(client, line);
  CHECK(parse(line).first == "welcome");
  client << "frame {\"x\":0.7,\"y\":0.5,\"dt\":0.03}\n" << std::flush;
  std::getline(client, line);
  CHECK(parse(line).first == "render");
  client << "bye\n" << std::flush;
  std::getline(client, line);
  CHECK(line == "bye {}");
  t.join();
  CHECK(log.str() == "listening 127.0.0.1:" + std::to_string(port) + "\n");
}
