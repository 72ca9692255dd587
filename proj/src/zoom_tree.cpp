#include "zoomwrite/zoom_tree.hpp"

#include <algorithm>
#include <string>

#include "zoomwrite/arithmetic_coder.hpp"
#include "zoomwrite/error.hpp"

namespace zw {

ZoomTree::ZoomTree(const PpmModel& model, SymbolSeq seed_context)
    : model_(&model), seed_(std::move(seed_context)) {
  reset_root();
}

void ZoomTree::reset_root() {
  root_ = ZoomNode{};
  root_.lo = 0;
  root_.hi = kSpan;
}

bool ZoomTree::expandable(const ZoomNode& node) const {
  return node.width() >= static_cast<std::int64_t>(model_->alphabet_size());
}

SymbolSeq ZoomTree::prefix_of(const ZoomNode& node) const {
  SymbolSeq path;
  for (const ZoomNode* n = &node; n->parent != nullptr; n = n->parent) path.push_back(n->symbol);
  SymbolSeq out = root_prefix_;
  out.insert(out.end(), path.rbegin(), path.rend());
  return out;
}

SymbolSeq ZoomTree::context_of(const ZoomNode& node) const {
  SymbolSeq ctx = seed_;
  const SymbolSeq prefix = prefix_of(node);
  ctx.insert(ctx.end(), prefix.begin(), prefix.end());
  return ctx;
}

std::span<ZoomNode> ZoomTree::expand(ZoomNode& node) {
  if (node.expanded()) return node.children;
  if (!expandable(node)) {
    throw ExpansionError("node of width " + std::to_string(node.width()) +
                         " is narrower than the alphabet");
  }
  const QuantizedDist q =
      quantize(model_->predict(context_of(node)), static_cast<std::uint64_t>(node.width()));
  std::vector<ZoomNode> kids(q.weights.size());
  std::int64_t at = node.lo;
  for (std::size_t s = 0; s < kids.size(); ++s) {
    kids[s].symbol = static_cast<Symbol>(s);
    kids[s].lo = at;
    at += static_cast<std::int64_t>(q.weights[s]);
    kids[s].hi = at;
    kids[s].depth = node.depth + 1;
    kids[s].parent = &node;
  }
  node.children = std::move(kids);
  return node.children;
}

std::vector<ZoomNode*> ZoomTree::locate(std::int64_t point, std::int64_t min_width) {
  if (point < 0 || point >= kSpan) {
    throw DomainError("point " + std::to_string(point) + " outside [0, " + std::to_string(kSpan) + ")");
  }
  std::vector<ZoomNode*> path{&root_};
  while (expandable(*path.back())) {
    auto kids = expand(*path.back());
    auto it = std::upper_bound(kids.begin(), kids.end(), point,
                               [](std::int64_t p, const ZoomNode& n) { return p < n.hi; });
    if (it == kids.end() || it->width() < min_width) break;
    path.push_back(&*it);
  }
  return path;
}

std::vector<ZoomNode*> ZoomTree::containing_path(std::int64_t lo, std::int64_t hi) {
  std::vector<ZoomNode*> path{&root_};
  while (expandable(*path.back())) {
    auto kids = expand(*path.back());
    auto it = std::upper_bound(kids.begin(), kids.end(), lo,
                               [](std::int64_t p, const ZoomNode& n) { return p < n.hi; });
    if (it == kids.end() || !it->contains(lo, hi)) break;
    path.push_back(&*it);
  }
  return path;
}

std::vector<RebaseMove> ZoomTree::rebase(Interval& view) {
  std::vector<RebaseMove> moves;
  const auto span = static_cast<double>(kSpan);

  while ((view.lo < 0.0 || view.hi > span) && !root_prefix_.empty()) {
    const Symbol s = root_prefix_.back();
    root_prefix_.pop_back();
    reset_root();
    const ZoomNode& c = expand(root_)[s];
    const auto lo = static_cast<double>(c.lo);
    const auto w = static_cast<double>(c.width());
    view.lo = lo + view.lo * w / span;
    view.hi = lo + view.hi * w / span;
    moves.push_back({false, s, c.lo, c.width()});
  }

  // At the global root nothing lies outside the span.
  if (view.width() >= span) {
    view = {0.0, span};
  } else if (view.lo < 0.0) {
    view = {0.0, view.width()};
  } else if (view.hi > span) {
    view = {span - view.width(), span};
  }

  while (view.width() < span / 2.0) {
    auto kids = expand(root_);
    auto it = std::find_if(kids.begin(), kids.end(), [&](const ZoomNode& n) {
      return static_cast<double>(n.lo) <= view.lo && view.hi <= static_cast<double>(n.hi);
    });
    if (it == kids.end()) break;
    const RebaseMove move{true, it->symbol, it->lo, it->width()};
    root_prefix_.push_back(move.symbol);
    reset_root();
    const auto lo = static_cast<double>(move.lo);
    const auto w = static_cast<double>(move.width);
    view.lo = (view.lo - lo) * span / w;
    view.hi = (view.hi - lo) * span / w;
    moves.push_back(move);
  }
  return moves;
}

}  // namespace zw
