#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/ppm_model.hpp"

namespace zw {

// A section of the shelf: every text beginning with this node's prefix.
// Coordinates are integer units relative to the tree's current root.
struct ZoomNode {
  Symbol symbol = 0;  // last symbol of the prefix; unused for the root
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::size_t depth = 0;  // symbols below the tree root
  ZoomNode* parent = nullptr;
  std::vector<ZoomNode> children;  // filled once by ZoomTree::expand

  std::int64_t width() const { return hi - lo; }
  bool expanded() const { return !children.empty(); }
  bool contains(std::int64_t a, std::int64_t b) const { return lo <= a && b <= hi; }
};

// View interval in root units. Real-valued so zoom steps can be mapped
// through rebases before the caller rounds it.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
};

// One change of root. The child occupied [lo, lo + width) of its parent.
// Inward moves map x -> (x - lo) * span / width; outward moves apply the
// inverse, x -> lo + x * width / span.
struct RebaseMove {
  bool inward = true;
  Symbol symbol = 0;
  std::int64_t lo = 0;
  std::int64_t width = 0;
};

// Lazily expanded alphabetical interval tree over all texts. Each expanded
// node splits its integer width among its children with
// quantize(predict(context), width), in alphabet order. The root always
// spans [0, kSpan); descending into a child re-anchors that child as the
// root so zoom depth is unbounded.
class ZoomTree {
 public:
  static constexpr std::int64_t kSpan = std::int64_t{1} << 30;

  // The model must outlive the tree. seed_context conditions predictions
  // without being part of any prefix.
  explicit ZoomTree(const PpmModel& model, SymbolSeq seed_context = {});

  ZoomTree(const ZoomTree&) = delete;
  ZoomTree& operator=(const ZoomTree&) = delete;

  std::int64_t span() const { return kSpan; }
  ZoomNode& root() { return root_; }
  const ZoomNode& root() const { return root_; }
  const SymbolSeq& root_prefix() const { return root_prefix_; }
  const SymbolSeq& seed_context() const { return seed_; }
  std::size_t alphabet_size() const { return model_->alphabet_size(); }

  // Idempotent. Throws ExpansionError when the node is narrower than the
  // alphabet.
  std::span<ZoomNode> expand(ZoomNode& node);
  bool expandable(const ZoomNode& node) const;

  // root_prefix followed by the symbols from the root down to node.
  SymbolSeq prefix_of(const ZoomNode& node) const;
  // Model context for predicting node's children.
  SymbolSeq context_of(const ZoomNode& node) const;

  // Root, then each deeper node containing point, stopping before the first
  // node narrower than min_width or at a node too narrow to expand. Throws
  // DomainError when point is outside [0, span).
  std::vector<ZoomNode*> locate(std::int64_t point, std::int64_t min_width);

  // Root, then each deeper node fully containing [lo, hi).
  std::vector<ZoomNode*> containing_path(std::int64_t lo, std::int64_t hi);

  // Moves the root so that the view is expressed at full precision:
  // while the view escapes [0, span) the parent is reconstructed (clamping
  // the view into the span once the global root is reached), then while the
  // view is narrower than half the span and inside one child, that child
  // becomes the root. The view is rewritten through the same maps.
  std::vector<RebaseMove> rebase(Interval& view);

 private:
  void reset_root();

  const PpmModel* model_;
  SymbolSeq seed_;
  SymbolSeq root_prefix_;
  ZoomNode root_;
};

}  // namespace zw
