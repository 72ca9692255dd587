#include "zoomwrite/simulation.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <deque>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "zoomwrite/arithmetic_coder.hpp"
#include "zoomwrite/error.hpp"

namespace zw {
namespace {

using Rational = boost::multiprecision::cpp_rational;

// Steering decision for the text `symbols` continuing from `anchor`.
Pointer plan_from(Session& session, ZoomNode& anchor, std::span<const Symbol> symbols, int lookahead) {
  ZoomTree& tree = session.tree();
  const std::size_t n = std::min<std::size_t>(symbols.size(), static_cast<std::size_t>(std::max(lookahead, 1)));
  SymbolSeq context = tree.context_of(anchor);

  ZoomNode* node = &anchor;
  Rational lo(anchor.lo);
  Rational hi(anchor.hi);
  for (std::size_t j = 0; j < n; ++j) {
    const Symbol s = symbols[j];
    if (s >= tree.alphabet_size()) throw DomainError("target symbol outside the alphabet");
    if (node != nullptr && tree.expandable(*node)) {
      node = &tree.expand(*node)[s];
      lo = node->lo;
      hi = node->hi;
    } else {
      node = nullptr;
      const QuantizedDist q = quantize(session.model().predict(context), ZoomTree::kSpan);
      const Rational width = hi - lo;
      const std::uint64_t cum = q.cumulative(s);
      hi = lo + width * Rational(cum + q.weights[s], ZoomTree::kSpan);
      lo = lo + width * Rational(cum, ZoomTree::kSpan);
    }
    context.push_back(s);
  }

  Rational mid = (lo + hi) / 2;
  if (n == symbols.size()) {
    // The text ends here: aim at the child boundary nearest the middle, so
    // the view straddles two continuations and cannot commit past the end.
    std::vector<Rational> edges;
    if (node != nullptr && tree.expandable(*node)) {
      for (const ZoomNode& c : tree.expand(*node)) edges.emplace_back(c.lo);
    } else {
      const QuantizedDist q = quantize(session.model().predict(context), ZoomTree::kSpan);
      std::uint64_t cum = 0;
      for (std::uint64_t w : q.weights) {
        edges.push_back(lo + (hi - lo) * Rational(cum, ZoomTree::kSpan));
        cum += w;
      }
    }
    const Rational target = mid;
    for (std::size_t k = 1; k < edges.size(); ++k) {
      if (k == 1 || abs(edges[k] - target) < abs(mid - target)) mid = edges[k];
    }
  }
  const Rational vlo(session.view_lo());
  const Rational vhi(session.view_hi());
  const double y = static_cast<double>((mid - vlo) / (vhi - vlo));
  if (mid >= vlo && mid < vhi) return Pointer{1.0, y};
  // Zoom out about the far edge so the view grows toward the target.
  return Pointer{0.0, mid < vlo ? 1.0 : 0.0};
}

std::vector<SymbolSeq> split_words(std::span<const Symbol> text, Symbol separator) {
  std::vector<SymbolSeq> words(1);
  for (Symbol s : text) {
    if (s == separator) {
      words.emplace_back();
    } else {
      words.back().push_back(s);
    }
  }
  std::erase_if(words, [](const SymbolSeq& w) { return w.empty(); });
  return words;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(jitter_std >= 0.0)) throw ConfigError("jitter must be non-negative");
  if (!(latency_s >= 0.0)) throw ConfigError("latency must be non-negative");
}

std::string SimulationReport::to_record() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "target=" << nlohmann::json(target).dump() << " written=" << nlohmann::json(written).dump()
     << " completed=" << (completed ? 1 : 0) << " elapsed_s=" << elapsed_s
     << " chars_per_sec=" << chars_per_sec << " words_per_min=" << words_per_min
     << " model_bits_per_char=" << model_bits_per_char << " wrong_words_pct=" << wrong_words_pct
     << " budget_s=" << budget_s << " frames=" << frames;
  return os.str();
}

Pointer plan_target(Session& session, std::span<const Symbol> remaining, int lookahead) {
  if (remaining.empty()) throw DomainError("nothing left to plan for");
  return plan_from(session, session.committed_node(), remaining, lookahead);
}

double wrong_words_pct(std::span<const Symbol> target, std::span<const Symbol> written, Symbol separator) {
  const auto want = split_words(target, separator);
  const auto got = split_words(written, separator);
  if (want.empty()) return got.empty() ? 0.0 : 100.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < std::max(want.size(), got.size()); ++i) {
    if (i >= want.size() || i >= got.size() || want[i] != got[i]) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(want.size());
}

SimulationReport simulate(const PpmModel& model, const Alphabet& alphabet, std::string_view target,
                          const DynamicsParams& params, const NoiseModel& noise, double frame_dt,
                          const SimulationOptions& options) {
  return simulate(model, alphabet, normalize_text(target, alphabet), params, noise, frame_dt, options);
}

SimulationReport simulate(const PpmModel& model, const Alphabet& alphabet, std::span<const Symbol> target,
                          const DynamicsParams& params, const NoiseModel& noise, double frame_dt,
                          const SimulationOptions& options) {
  if (!(frame_dt > 0.0)) throw ConfigError("frame dt must be positive");
  if (target.empty()) throw DomainError("target normalizes to empty text");
  params.validate();
  noise.validate();
  if (model.alphabet_size() != alphabet.size()) throw ConfigError("model and alphabet sizes differ");
  for (Symbol s : target) {
    if (!alphabet.contains(s)) throw DomainError("target symbol outside the alphabet");
  }

  PpmModel own = model;
  SimulationReport report;
  report.target = alphabet.render(target);
  report.model_bits_per_char = cross_entropy(own, target, true);
  report.budget_s = options.budget_factor * static_cast<double>(target.size()) * report.model_bits_per_char /
                    params.max_rate_bits_per_sec;

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> jitter(0.0, noise.jitter_std > 0.0 ? noise.jitter_std : 1.0);
  std::deque<std::pair<double, Pointer>> pending;
  const Pointer idle{params.crosshair_x, 0.5};
  Pointer applied = idle;
  const RenderOptions no_render{.boxes = false};

  {
    Session session(own, params);
    const SymbolSeq goal(target.begin(), target.end());
    while (session.committed() != goal && session.metrics().elapsed_s < report.budget_s) {
      const SymbolSeq& done = session.committed();
      std::size_t common = 0;
      while (common < done.size() && common < goal.size() && done[common] == goal[common]) ++common;

      Pointer decided;
      const std::size_t rooted = session.tree().root_prefix().size();
      if (common == done.size()) {
        decided = plan_target(session, std::span(goal).subspan(common), options.lookahead);
      } else if (common >= rooted) {
        auto path = session.tree().containing_path(session.view_lo(), session.view_hi());
        decided = plan_from(session, *path[common - rooted], std::span(goal).subspan(common), options.lookahead);
      } else {
        decided = Pointer{0.0, 0.5};
      }
      if (noise.jitter_std > 0.0) {
        decided.x += jitter(rng);
        decided.y += jitter(rng);
      }

      const double now = session.metrics().elapsed_s;
      pending.emplace_back(now, decided);
      while (!pending.empty() && pending.front().first <= now - noise.latency_s + 1e-12) {
        applied = pending.front().second;
        pending.pop_front();
      }
      session.step(applied, frame_dt, no_render);
      ++report.frames;
    }

    const SessionMetrics& m = session.metrics();
    report.written = alphabet.render(session.committed());
    report.completed = session.committed() == goal;
    report.elapsed_s = m.elapsed_s;
    report.chars_per_sec = m.chars_per_sec;
    report.words_per_min = m.words_per_min();
    report.wrong_words_pct = wrong_words_pct(goal, session.committed(), alphabet.separator());
  }
  return report;
}

}  // namespace zw
