#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/ppm_model.hpp"
#include "zoomwrite/session.hpp"

namespace zw {

// Stand-in for gaze behaviour: isotropic Gaussian jitter on the pointer and
// a fixed delay between deciding on a pointer position and applying it.
struct NoiseModel {
  double jitter_std = 0.0;  // unit-square coordinates
  double latency_s = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulationOptions {
  int lookahead = 5;
  double budget_factor = 4.0;  // budget = factor * len * H / R seconds
};

struct SimulationReport {
  std::string target;
  std::string written;
  double elapsed_s = 0.0;
  double chars_per_sec = 0.0;
  double words_per_min = 0.0;
  double model_bits_per_char = 0.0;  // adaptive cross-entropy of the target
  double wrong_words_pct = 0.0;
  double budget_s = 0.0;
  bool completed = false;
  std::size_t frames = 0;

  // Single-line `key=value` record; strings are JSON-quoted.
  std::string to_record() const;
};

// Pointer that steers toward the text `remaining` written after the
// session's committed text. The target is the midpoint of the interval of
// the next min(lookahead, len) symbols, computed exactly: through the tree's
// own nodes while they can be expanded, then by rational subdivision with
// quantize(predict(...), span). When the window reaches the end of the text
// the aim moves to the child edge nearest the midpoint, so the view never
// settles inside a continuation. If the aim is in view the pointer zooms
// in at full rate with its height on the aim; otherwise it zooms out
// from the opposite screen edge so the target comes back into view.
// Throws DomainError on empty remaining or invalid symbols.
Pointer plan_target(Session& session, std::span<const Symbol> remaining, int lookahead = 5);

// Percentage of target words not reproduced at the same word position.
double wrong_words_pct(std::span<const Symbol> target, std::span<const Symbol> written, Symbol separator);

// Writes target with a fresh session over a private copy of the model.
// Deterministic for a given noise seed. Throws ConfigError on a
// non-positive frame_dt and DomainError when the target normalizes to
// nothing.
SimulationReport simulate(const PpmModel& model, const Alphabet& alphabet, std::string_view target,
                          const DynamicsParams& params, const NoiseModel& noise, double frame_dt,
                          const SimulationOptions& options = {});

SimulationReport simulate(const PpmModel& model, const Alphabet& alphabet, std::span<const Symbol> target,
                          const DynamicsParams& params, const NoiseModel& noise, double frame_dt,
                          const SimulationOptions& options = {});

}  // namespace zw
