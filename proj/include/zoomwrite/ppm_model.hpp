#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zoomwrite/alphabet.hpp"

namespace zw {

// Probability of each symbol of the alphabet, indexed by symbol.
struct Distribution {
  std::vector<double> probs;

  double operator[](Symbol s) const { return probs[s]; }
  std::size_t size() const { return probs.size(); }
};

// Record of the trie mutations made by one PpmModel::observe call. Tokens
// are move-only and must be rolled back in LIFO order.
class UndoToken {
 public:
  UndoToken() = default;
  UndoToken(UndoToken&& other) noexcept;
  UndoToken& operator=(UndoToken&& other) noexcept;
  UndoToken(const UndoToken&) = delete;
  UndoToken& operator=(const UndoToken&) = delete;

  bool valid() const { return serial_ != 0; }

 private:
  friend class PpmModel;

  enum class Op : std::uint8_t { kIncrement, kCreate };
  struct Mutation {
    Op op;
    std::uint32_t node;
    std::uint32_t parent;  // kCreate only
  };

  std::uint64_t model_id_ = 0;
  std::uint64_t serial_ = 0;
  std::vector<Mutation> mutations_;
};

// Prediction by partial matching with escape method D.
//
// The trie is a forward context trie: the node reached by the path
// s1..sk stores how often sk followed the context s1..s(k-1), and its
// children are the successor counts of context s1..sk. Depth is bounded by
// order + 1.
//
// Prediction blends from the longest available context down to order 0
// with full exclusion; a symbol with count c in a context holding n
// non-excluded observations over d distinct symbols gets (2c-1)/(2n) of the
// mass reaching that context and d/(2n) escapes. Whatever escapes order 0
// is spread uniformly over the symbols not yet seen. If every symbol was
// already seen the residual escape mass is renormalized away.
//
// Observation uses update exclusion: starting at the longest existing
// context, counts are bumped where the symbol is found and created (count 1)
// in every longer context where it was novel.
class PpmModel {
 public:
  static constexpr int kMaxOrder = 8;

  PpmModel(int order, std::size_t alphabet_size);

  PpmModel(const PpmModel& other);
  PpmModel& operator=(const PpmModel& other);
  PpmModel(PpmModel&&) noexcept = default;
  PpmModel& operator=(PpmModel&&) noexcept = default;

  int order() const { return order_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t open_tokens() const { return open_.size(); }

  // Only the last order() symbols of the context are used.
  Distribution predict(std::span<const Symbol> context) const;

  UndoToken observe(std::span<const Symbol> context, Symbol symbol);
  void rollback(UndoToken&& token);

  // Sequential observation without undo records. Refused while tokens are
  // outstanding, since the untracked mutations would break LIFO rollback.
  void train(std::span<const Symbol> text);

  // Successor counts of the exact context, or nullopt when the context is
  // not in the trie.
  std::optional<std::vector<std::pair<Symbol, std::uint32_t>>> successors(
      std::span<const Symbol> context) const;

  // Counts are positive and every context's one-shorter suffix exists.
  bool check_invariants() const;

  // Versioned binary dump: "ZWPM", version, order, alphabet size, then the
  // trie in preorder as (symbol, count, child count) triples with children
  // sorted by symbol. The root contributes only its child count.
  std::vector<std::uint8_t> snapshot() const;
  static PpmModel from_snapshot(std::span<const std::uint8_t> bytes);

 private:
  struct Node {
    Symbol symbol = 0;
    std::uint32_t count = 0;
    std::vector<std::uint32_t> children;  // sorted by symbol
  };

  static constexpr std::uint32_t kRoot = 0;

  std::optional<std::uint32_t> child(std::uint32_t node, Symbol s) const;
  std::optional<std::uint32_t> find(std::span<const Symbol> ctx) const;
  std::uint32_t create_child(std::uint32_t parent, Symbol s);
  void apply(std::span<const Symbol> context, Symbol symbol,
             std::vector<UndoToken::Mutation>* log);
  void check_symbol(Symbol s) const;

  int order_;
  std::size_t alphabet_size_;
  std::vector<Node> nodes_;
  std::uint64_t id_;
  std::uint64_t next_serial_ = 1;
  std::vector<std::uint64_t> open_;
};

PpmModel new_model(int order, const Alphabet& alphabet);

// Mean -log2 P(symbol | preceding symbols) in bits per symbol. With adapt
// set, each symbol is observed after it is scored; all observations are
// rolled back before returning. Throws DomainError on empty text.
double cross_entropy(PpmModel& model, std::span<const Symbol> text, bool adapt);

}  // namespace zw
