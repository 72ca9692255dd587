#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/ppm_model.hpp"
#include "zoomwrite/zoom_tree.hpp"

namespace zw {

struct DynamicsParams {
  double max_rate_bits_per_sec = 8.0;
  double crosshair_x = 0.5;
  std::int64_t min_view_width = 1;  // root units
  double frame_dt_cap = 0.1;        // seconds

  // Throws ConfigError.
  void validate() const;
};

// Pointer in screen fractions: x = 0 is the left edge, y = 0 the top.
struct Pointer {
  double x = 0.5;
  double y = 0.5;
};

struct SessionMetrics {
  double elapsed_s = 0.0;
  std::size_t committed_chars = 0;
  double bits_entered = 0.0;  // net integral of the zoom rate
  double chars_per_sec = 0.0;
  double bits_per_char_effective = 0.0;

  // Five characters per word.
  double words_per_min() const { return chars_per_sec * 60.0 / 5.0; }
};

// One node as drawn: unit-square screen fractions, clipped to the screen.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  Symbol symbol = 0;
  std::size_t depth = 0;  // length of the node's text prefix
};

struct TextDelta {
  std::size_t removed = 0;  // symbols popped from the end
  SymbolSeq added;          // then appended

  bool empty() const { return removed == 0 && added.empty(); }
};

struct FrameResult {
  std::vector<Box> boxes;
  TextDelta delta;
  SymbolSeq committed;
  SessionMetrics metrics;
  double rate_bits_per_sec = 0.0;
};

struct RenderOptions {
  bool boxes = true;
  double min_box_height = 0.004;  // screen fraction
  std::size_t max_boxes = 4000;
};

// The live writing process. Each step zooms the view about the pointer's
// height at a rate set by the pointer's horizontal offset from the
// crosshair, then commits every symbol whose node now fully contains the
// view and uncommits those that no longer do. Commits observe the symbol in
// the model; uncommits roll the observation back. Destroying the session
// rolls back everything still committed.
class Session {
 public:
  // The model must outlive the session and must not be mutated by anyone
  // else while the session is alive.
  Session(PpmModel& model, DynamicsParams params, SymbolSeq seed_context = {});
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  FrameResult step(Pointer pointer, double dt, const RenderOptions& render = {});

  const SymbolSeq& committed() const { return committed_; }
  const SessionMetrics& metrics() const { return metrics_; }
  const DynamicsParams& params() const { return params_; }
  void set_params(const DynamicsParams& params);

  std::int64_t view_lo() const { return view_lo_; }
  std::int64_t view_hi() const { return view_hi_; }
  ZoomTree& tree() { return tree_; }
  const ZoomTree& tree() const { return tree_; }
  const PpmModel& model() const { return *model_; }
  const SymbolSeq& seed_context() const { return tree_.seed_context(); }

  // Deepest tree node fully containing the view (the end of the committed
  // path below the root).
  ZoomNode& committed_node();

  // Boxes for the current view without stepping.
  std::vector<Box> render(const RenderOptions& options = {});

 private:
  TextDelta sync_commits();

  PpmModel* model_;
  DynamicsParams params_;
  ZoomTree tree_;
  std::int64_t view_lo_ = 0;
  std::int64_t view_hi_ = ZoomTree::kSpan;
  SymbolSeq committed_;
  std::vector<UndoToken> undo_;
  SessionMetrics metrics_;
};

Session new_session(PpmModel& model, const DynamicsParams& params, const SymbolSeq& seed_context);

std::string committed_text(const Session& session, const Alphabet& alphabet);

}  // namespace zw
