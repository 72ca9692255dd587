#include "zoomwrite/session.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zoomwrite/error.hpp"

namespace zw {

void DynamicsParams::validate() const {
  if (!(max_rate_bits_per_sec > 0.0) || !std::isfinite(max_rate_bits_per_sec)) {
    throw ConfigError("max rate must be positive");
  }
  if (!(crosshair_x > 0.0 && crosshair_x < 1.0)) throw ConfigError("crosshair_x must lie in (0, 1)");
  if (min_view_width < 1 || min_view_width > ZoomTree::kSpan / 2) {
    throw ConfigError("min view width must lie in [1, span/2]");
  }
  if (!(frame_dt_cap > 0.0)) throw ConfigError("frame dt cap must be positive");
}

Session::Session(PpmModel& model, DynamicsParams params, SymbolSeq seed_context)
    : model_(&model), params_(params), tree_(model, std::move(seed_context)) {
  params_.validate();
}

Session::~Session() {
  while (!undo_.empty()) {
    model_->rollback(std::move(undo_.back()));
    undo_.pop_back();
  }
}

void Session::set_params(const DynamicsParams& params) {
  params.validate();
  params_ = params;
}

ZoomNode& Session::committed_node() { return *tree_.containing_path(view_lo_, view_hi_).back(); }

FrameResult Session::step(Pointer pointer, double dt, const RenderOptions& render) {
  pointer.x = std::clamp(pointer.x, 0.0, 1.0);
  pointer.y = std::clamp(pointer.y, 0.0, 1.0);
  dt = std::clamp(dt, 0.0, params_.frame_dt_cap);

  const double cx = params_.crosshair_x;
  const double rate =
      params_.max_rate_bits_per_sec * std::clamp((pointer.x - cx) / (1.0 - cx), -1.0, 1.0);

  const auto min_w = static_cast<double>(params_.min_view_width);
  const auto w = static_cast<double>(view_hi_ - view_lo_);
  const double fixed = static_cast<double>(view_lo_) + pointer.y * w;
  const double new_w = std::max(w * std::exp2(-rate * dt), min_w);

  Interval view{fixed - pointer.y * new_w, fixed - pointer.y * new_w + new_w};
  tree_.rebase(view);

  auto lo = static_cast<std::int64_t>(std::llround(view.lo));
  auto hi = static_cast<std::int64_t>(std::llround(view.hi));
  hi = std::max(hi, lo + params_.min_view_width);
  if (hi > ZoomTree::kSpan) {
    lo -= hi - ZoomTree::kSpan;
    hi = ZoomTree::kSpan;
  }
  lo = std::max<std::int64_t>(lo, 0);
  view_lo_ = lo;
  view_hi_ = std::max(hi, lo + 1);

  FrameResult out;
  out.delta = sync_commits();
  out.committed = committed_;
  out.rate_bits_per_sec = rate;

  metrics_.elapsed_s += dt;
  metrics_.bits_entered += rate * dt;
  metrics_.committed_chars = committed_.size();
  metrics_.chars_per_sec =
      metrics_.elapsed_s > 0.0 ? static_cast<double>(metrics_.committed_chars) / metrics_.elapsed_s : 0.0;
  metrics_.bits_per_char_effective =
      metrics_.committed_chars > 0 ? metrics_.bits_entered / static_cast<double>(metrics_.committed_chars)
                                   : 0.0;
  out.metrics = metrics_;

  if (render.boxes) out.boxes = this->render(render);
  return out;
}

TextDelta Session::sync_commits() {
  const auto path = tree_.containing_path(view_lo_, view_hi_);
  SymbolSeq target = tree_.root_prefix();
  for (std::size_t i = 1; i < path.size(); ++i) target.push_back(path[i]->symbol);

  std::size_t common = 0;
  while (common < target.size() && common < committed_.size() && target[common] == committed_[common]) {
    ++common;
  }

  TextDelta delta;
  while (committed_.size() > common) {
    model_->rollback(std::move(undo_.back()));
    undo_.pop_back();
    committed_.pop_back();
    ++delta.removed;
  }
  SymbolSeq context = tree_.seed_context();
  context.insert(context.end(), committed_.begin(), committed_.end());
  for (std::size_t i = common; i < target.size(); ++i) {
    undo_.push_back(model_->observe(context, target[i]));
    context.push_back(target[i]);
    committed_.push_back(target[i]);
    delta.added.push_back(target[i]);
  }
  return delta;
}

std::vector<Box> Session::render(const RenderOptions& options) {
  std::vector<Box> boxes;
  const auto vlo = static_cast<double>(view_lo_);
  const auto w = static_cast<double>(view_hi_ - view_lo_);
  const std::size_t base_depth = tree_.root_prefix().size();

  std::vector<ZoomNode*> stack{&tree_.root()};
  while (!stack.empty() && boxes.size() < options.max_boxes) {
    ZoomNode* node = stack.back();
    stack.pop_back();
    const double y0 = (static_cast<double>(node->lo) - vlo) / w;
    const double y1 = (static_cast<double>(node->hi) - vlo) / w;
    if (y1 <= 0.0 || y0 >= 1.0 || y1 - y0 < options.min_box_height) continue;

    Box b;
    b.y0 = std::max(y0, 0.0);
    b.y1 = std::min(y1, 1.0);
    b.x0 = std::max(0.0, 1.0 - (y1 - y0));
    b.x1 = 1.0;
    b.symbol = node->parent != nullptr ? node->symbol
               : base_depth > 0     ? tree_.root_prefix().back()
                                    : Symbol{0};
    b.depth = base_depth + node->depth;
    if (node->parent != nullptr || base_depth > 0) boxes.push_back(b);

    if (tree_.expandable(*node)) {
      auto kids = tree_.expand(*node);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(&*it);
    }
  }
  return boxes;
}

Session new_session(PpmModel& model, const DynamicsParams& params, const SymbolSeq& seed_context) {
  return Session(model, params, seed_context);
}

std::string committed_text(const Session& session, const Alphabet& alphabet) {
  return alphabet.render(session.committed());
}

}  // namespace zw
