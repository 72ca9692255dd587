#include "zoomwrite/harness_cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/arithmetic_coder.hpp"
#include "zoomwrite/error.hpp"
#include "zoomwrite/frame_protocol.hpp"
#include "zoomwrite/ppm_model.hpp"
#include "zoomwrite/simulation.hpp"

namespace zw {
namespace {

// File-system failure; mapped to exit code 1.
class IoError : public Error {
 public:
  using Error::Error;
};

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::string& path) {
  auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

Alphabet alphabet_from(const std::string& path) {
  if (path.empty()) return build_alphabet();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open alphabet " + path);
  return parse_alphabet(in);
}

PpmModel load_snapshot(const std::string& path, const Alphabet& alphabet) {
  PpmModel model = PpmModel::from_snapshot(read_bytes(path));
  if (model.alphabet_size() != alphabet.size()) {
    throw ConfigError("snapshot alphabet size " + std::to_string(model.alphabet_size()) +
                      " does not match alphabet size " + std::to_string(alphabet.size()));
  }
  return model;
}

struct Options {
  std::string alphabet;
  std::string corpus;
  std::string snapshot;
  std::string input;
  std::string output;
  int order = 5;
  bool adapt = false;

  std::string target;
  double rate = 8.0;
  double crosshair = 0.5;
  double jitter = 0.0;
  double latency = 0.0;
  std::uint64_t seed = 0;
  int runs = 1;
  double frame_dt = 1.0 / 30.0;
  int lookahead = 5;

  std::optional<unsigned short> port;
  bool stdio = false;
  std::size_t max_connections = 0;
};

int cmd_train(const Options& o, std::ostream& out) {
  const Alphabet alphabet = alphabet_from(o.alphabet);
  std::ifstream in(o.corpus, std::ios::binary);
  if (!in) throw IoError("cannot open " + o.corpus);
  const Corpus corpus = load_corpus(in, alphabet);
  PpmModel model = new_model(o.order, alphabet);
  model.train(corpus.symbols);
  write_bytes(o.output, model.snapshot());
  out << "chars_in=" << corpus.chars_before << " symbols=" << corpus.chars_after
      << " nodes=" << model.node_count() << "\n";
  return kExitOk;
}

int cmd_entropy(const Options& o, std::ostream& out) {
  const Alphabet alphabet = alphabet_from(o.alphabet);
  PpmModel model = load_snapshot(o.snapshot, alphabet);
  const SymbolSeq text = normalize_text(read_text(o.input), alphabet);
  out << std::fixed << std::setprecision(6) << cross_entropy(model, text, o.adapt) << "\n";
  return kExitOk;
}

int cmd_compress(const Options& o, std::ostream&) {
  const Alphabet alphabet = alphabet_from(o.alphabet);
  PpmModel model = load_snapshot(o.snapshot, alphabet);
  const SymbolSeq text = normalize_text(read_text(o.input), alphabet);
  write_bytes(o.output, encode(model, text).to_bytes());
  return kExitOk;
}

int cmd_decompress(const Options& o, std::ostream&) {
  const Alphabet alphabet = alphabet_from(o.alphabet);
  PpmModel model = load_snapshot(o.snapshot, alphabet);
  const Bitstream stream = Bitstream::from_bytes(read_bytes(o.input));
  const std::string text = alphabet.render(decode(model, stream));
  write_bytes(o.output, std::vector<std::uint8_t>(text.begin(), text.end()));
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Alphabet alphabet = alphabet_from(o.alphabet);
  const PpmModel model = load_snapshot(o.snapshot, alphabet);
  const std::string target = read_text(o.target);

  DynamicsParams params;
  params.max_rate_bits_per_sec = o.rate;
  params.crosshair_x = o.crosshair;
  SimulationOptions sim;
  sim.lookahead = o.lookahead;

  double total_wpm = 0.0;
  double total_elapsed = 0.0;
  double total_wrong = 0.0;
  int completed = 0;
  out << std::setprecision(10);
  for (int run = 0; run < o.runs; ++run) {
    NoiseModel noise{o.jitter, o.latency, o.seed + static_cast<std::uint64_t>(run)};
    const SimulationReport r = simulate(model, alphabet, target, params, noise, o.frame_dt, sim);
    out << "run=" << run << " seed=" << noise.seed << " " << r.to_record() << "\n";
    total_wpm += r.words_per_min;
    total_elapsed += r.elapsed_s;
    total_wrong += r.wrong_words_pct;
    completed += r.completed ? 1 : 0;
  }
  const double n = std::max(o.runs, 1);
  out << std::fixed << std::setprecision(3) << "# " << o.runs << " runs, " << completed
      << " completed, mean " << total_wpm / n << " words/min, mean elapsed " << total_elapsed / n
      << " s, mean wrong words " << total_wrong / n << "%\n";
  return kExitOk;
}

int cmd_serve(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  const Alphabet alphabet = alphabet_from(o.alphabet);
  const PpmModel model = load_snapshot(o.snapshot, alphabet);
  DynamicsParams params;
  params.max_rate_bits_per_sec = o.rate;
  params.crosshair_x = o.crosshair;
  if (o.stdio || !o.port) {
    FrameServer server(model, alphabet, params);
    serve_stream(server, in, out);
  } else {
    serve_tcp(model, alphabet, params, *o.port, err, o.max_connections);
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zooming text entry engine: model training, coding, simulation and UI server", "zoomwrite"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Train a model snapshot on a corpus");
  train->add_option("corpus", o.corpus, "Training text")->required();
  train->add_option("-o,--output", o.output, "Snapshot file to write")->required();
  train->add_option("--order", o.order, "Maximum context length")->check(CLI::Range(0, PpmModel::kMaxOrder));

  auto* entropy = app.add_subcommand("entropy", "Cross-entropy of a text in bits per character");
  entropy->add_option("snapshot", o.snapshot)->required();
  entropy->add_option("text", o.input)->required();
  entropy->add_flag("--adapt", o.adapt, "Adapt the model while scoring");

  auto* compress = app.add_subcommand("compress", "Arithmetic-code a text");
  compress->add_option("snapshot", o.snapshot)->required();
  compress->add_option("input", o.input)->required();
  compress->add_option("-o,--output", o.output)->required();

  auto* decompress = app.add_subcommand("decompress", "Decode a compressed stream");
  decompress->add_option("snapshot", o.snapshot)->required();
  decompress->add_option("input", o.input)->required();
  decompress->add_option("-o,--output", o.output)->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Write a target text with the steering oracle");
  simulate_cmd->add_option("snapshot", o.snapshot)->required();
  simulate_cmd->add_option("--target", o.target, "Text to write")->required();
  simulate_cmd->add_option("--rate", o.rate, "Maximum zoom rate, bits/s");
  simulate_cmd->add_option("--crosshair", o.crosshair, "Horizontal position of zero zoom");
  simulate_cmd->add_option("--jitter", o.jitter, "Pointer noise standard deviation");
  simulate_cmd->add_option("--latency", o.latency, "Pointer delay, seconds");
  simulate_cmd->add_option("--seed", o.seed, "Noise seed of the first run");
  simulate_cmd->add_option("--runs", o.runs, "Number of runs (seeds seed..seed+runs-1)")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--frame-dt", o.frame_dt, "Simulated frame period, seconds");
  simulate_cmd->add_option("--lookahead", o.lookahead, "Symbols planned ahead")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the frame protocol to a UI");
  serve->add_option("snapshot", o.snapshot)->required();
  auto* port = serve->add_option("--port", o.port, "TCP port on 127.0.0.1 (0 picks one)");
  auto* stdio = serve->add_flag("--stdio", o.stdio, "Speak the protocol on stdin/stdout");
  port->excludes(stdio);
  serve->add_option("--rate", o.rate, "Maximum zoom rate, bits/s");
  serve->add_option("--crosshair", o.crosshair, "Horizontal position of zero zoom");
  serve->add_option("--max-connections", o.max_connections, "Exit after this many clients (0 = never)");

  for (auto* sub : {train, entropy, compress, decompress, simulate_cmd, serve}) {
    sub->add_option("--alphabet", o.alphabet, "Alphabet file (default a-z and space)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "zoomwrite: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(o, out);
    if (entropy->parsed()) return cmd_entropy(o, out);
    if (compress->parsed()) return cmd_compress(o, out);
    if (decompress->parsed()) return cmd_decompress(o, out);
    if (simulate_cmd->parsed()) return cmd_simulate(o, out);
    if (serve->parsed()) return cmd_serve(o, in, out, err);
  } catch (const std::exception& e) {
    err << "zoomwrite: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace zw
