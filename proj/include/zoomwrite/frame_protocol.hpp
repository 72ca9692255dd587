#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/ppm_model.hpp"
#include "zoomwrite/session.hpp"

namespace zw {

inline constexpr int kProtocolVersion = 1;

// Line-oriented request/response protocol between the engine and a UI.
//
// Every message is one line: a verb, optionally followed by a space and a
// JSON object.
//
//   client                                   server
//   hello {"protocol_version":1}             welcome {"protocol_version","alphabet","separator","params"}
//   config {"rate":R,"crosshair_x":C}        (no reply; echoed in the next render's params)
//   frame {"x":X,"y":Y,"dt":DT}              render {"boxes","committed","delta","metrics","params"}
//   reset {"seed_context":"text"}            (no reply)
//   bye                                      bye {}
//
// A wrong protocol version, or any message before hello, is answered with
// `error {"message":...}` and the connection closes. Malformed messages
// after the handshake get an error reply and the connection stays open.
class FrameServer {
 public:
  struct Reply {
    std::vector<std::string> lines;
    bool close = false;
  };

  // The server works on its own copy of the model; each session's
  // adaptation is rolled back on reset.
  FrameServer(const PpmModel& model, Alphabet alphabet, DynamicsParams params);
  ~FrameServer();

  Reply handle(std::string_view line);

 private:
  std::string welcome() const;
  std::string render(const FrameResult& frame) const;
  void restart(const SymbolSeq& seed);

  PpmModel model_;
  Alphabet alphabet_;
  DynamicsParams params_;
  std::unique_ptr<Session> session_;
  bool greeted_ = false;
};

// Runs one conversation until `bye`, a fatal error, or end of input.
void serve_stream(FrameServer& server, std::istream& in, std::ostream& out);

// Accepts connections on 127.0.0.1:port one at a time, running a fresh
// conversation for each. Stops after max_connections when it is nonzero.
// Port 0 picks a free port; the bound port is reported on log as
// `listening 127.0.0.1:<port>`.
void serve_tcp(const PpmModel& model, const Alphabet& alphabet, const DynamicsParams& params,
               unsigned short port, std::ostream& log, std::size_t max_connections = 0);

}  // namespace zw
