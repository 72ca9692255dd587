#include "zoomwrite/ppm_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "zoomwrite/error.hpp"
#include "zoomwrite/varint.hpp"

namespace zw {
namespace {

constexpr std::uint8_t kSnapshotMagic[4] = {'Z', 'W', 'P', 'M'};
constexpr std::uint8_t kSnapshotVersion = 1;

std::uint64_t fresh_model_id() {
  static std::atomic<std::uint64_t> next{1};
  return next.fetch_add(1, std::memory_order_relaxed);
}

std::span<const Symbol> tail(std::span<const Symbol> s, std::size_t k) {
  return s.subspan(s.size() - k, k);
}

}  // namespace

UndoToken::UndoToken(UndoToken&& other) noexcept
    : model_id_(std::exchange(other.model_id_, 0)),
      serial_(std::exchange(other.serial_, 0)),
      mutations_(std::move(other.mutations_)) {}

UndoToken& UndoToken::operator=(UndoToken&& other) noexcept {
  model_id_ = std::exchange(other.model_id_, 0);
  serial_ = std::exchange(other.serial_, 0);
  mutations_ = std::move(other.mutations_);
  return *this;
}

PpmModel::PpmModel(int order, std::size_t alphabet_size)
    : order_(order), alphabet_size_(alphabet_size), nodes_(1), id_(fresh_model_id()) {
  if (order < 0 || order > kMaxOrder) {
    throw ConfigError("model order " + std::to_string(order) + " outside [0, " +
                      std::to_string(kMaxOrder) + "]");
  }
  if (alphabet_size < 2 || alphabet_size > 0xFFFF) {
    throw ConfigError("alphabet size " + std::to_string(alphabet_size) + " unsupported");
  }
}

// A copy is an independent model: outstanding tokens stay with the source.
PpmModel::PpmModel(const PpmModel& other)
    : order_(other.order_),
      alphabet_size_(other.alphabet_size_),
      nodes_(other.nodes_),
      id_(fresh_model_id()) {}

PpmModel& PpmModel::operator=(const PpmModel& other) {
  if (this != &other) {
    order_ = other.order_;
    alphabet_size_ = other.alphabet_size_;
    nodes_ = other.nodes_;
    id_ = fresh_model_id();
    next_serial_ = 1;
    open_.clear();
  }
  return *this;
}

void PpmModel::check_symbol(Symbol s) const {
  if (s >= alphabet_size_) {
    throw DomainError("symbol index " + std::to_string(s) + " outside alphabet of size " +
                      std::to_string(alphabet_size_));
  }
}

std::optional<std::uint32_t> PpmModel::child(std::uint32_t node, Symbol s) const {
  const auto& kids = nodes_[node].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), s, [this](std::uint32_t idx, Symbol sym) {
    return nodes_[idx].symbol < sym;
  });
  if (it != kids.end() && nodes_[*it].symbol == s) return *it;
  return std::nullopt;
}

std::optional<std::uint32_t> PpmModel::find(std::span<const Symbol> ctx) const {
  std::uint32_t node = kRoot;
  for (Symbol s : ctx) {
    auto next = child(node, s);
    if (!next) return std::nullopt;
    node = *next;
  }
  return node;
}

std::uint32_t PpmModel::create_child(std::uint32_t parent, Symbol s) {
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{s, 1, {}});
  auto& kids = nodes_[parent].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), s, [this](std::uint32_t i, Symbol sym) {
    return nodes_[i].symbol < sym;
  });
  kids.insert(it, idx);
  return idx;
}

Distribution PpmModel::predict(std::span<const Symbol> context) const {
  const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order_), context.size());
  Distribution dist{std::vector<double>(alphabet_size_, 0.0)};
  std::vector<char> excluded(alphabet_size_, 0);
  std::size_t remaining = alphabet_size_;
  double mass = 1.0;

  for (std::size_t k = longest + 1; k-- > 0;) {
    auto node = find(tail(context, k));
    if (!node) continue;
    std::uint64_t n = 0;
    std::uint64_t d = 0;
    for (std::uint32_t c : nodes_[*node].children) {
      if (excluded[nodes_[c].symbol]) continue;
      n += nodes_[c].count;
      ++d;
    }
    if (d == 0) continue;
    const double denom = 2.0 * static_cast<double>(n);
    for (std::uint32_t c : nodes_[*node].children) {
      const Symbol s = nodes_[c].symbol;
      if (excluded[s]) continue;
      dist.probs[s] = mass * (2.0 * nodes_[c].count - 1.0) / denom;
      excluded[s] = 1;
    }
    remaining -= d;
    mass *= static_cast<double>(d) / denom;
  }

  if (remaining > 0) {
    const double share = mass / static_cast<double>(remaining);
    for (std::size_t s = 0; s < alphabet_size_; ++s) {
      if (!excluded[s]) dist.probs[s] = share;
    }
  } else {
    const double scale = 1.0 / (1.0 - mass);
    for (double& p : dist.probs) p *= scale;
  }
  return dist;
}

void PpmModel::apply(std::span<const Symbol> context, Symbol symbol,
                     std::vector<UndoToken::Mutation>* log) {
  const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order_), context.size());
  std::size_t k = longest;
  std::optional<std::uint32_t> node = find(tail(context, k));
  while (!node) node = find(tail(context, --k));

  while (true) {
    if (auto hit = child(*node, symbol)) {
      ++nodes_[*hit].count;
      if (log) log->push_back({UndoToken::Op::kIncrement, *hit, 0});
      return;
    }
    const std::uint32_t created = create_child(*node, symbol);
    if (log) log->push_back({UndoToken::Op::kCreate, created, *node});
    if (k == 0) return;
    --k;
    // Suffix closure guarantees the shorter context exists.
    node = find(tail(context, k));
  }
}

UndoToken PpmModel::observe(std::span<const Symbol> context, Symbol symbol) {
  check_symbol(symbol);
  UndoToken token;
  token.model_id_ = id_;
  token.serial_ = next_serial_++;
  apply(context, symbol, &token.mutations_);
  open_.push_back(token.serial_);
  return token;
}

void PpmModel::rollback(UndoToken&& token) {
  if (!token.valid()) throw UsageError("rollback with an empty or consumed token");
  if (token.model_id_ != id_) throw UsageError("rollback with a token from another model");
  if (open_.empty() || open_.back() != token.serial_) {
    throw UsageError("rollback out of order: token is not the most recent observation");
  }
  for (auto it = token.mutations_.rbegin(); it != token.mutations_.rend(); ++it) {
    if (it->op == UndoToken::Op::kIncrement) {
      --nodes_[it->node].count;
    } else {
      auto& kids = nodes_[it->parent].children;
      kids.erase(std::find(kids.begin(), kids.end(), it->node));
      nodes_.pop_back();
    }
  }
  open_.pop_back();
  token.serial_ = 0;
  token.model_id_ = 0;
  token.mutations_.clear();
}

void PpmModel::train(std::span<const Symbol> text) {
  if (!open_.empty()) throw UsageError("train while undo tokens are outstanding");
  for (Symbol s : text) check_symbol(s);
  for (std::size_t i = 0; i < text.size(); ++i) apply(text.first(i), text[i], nullptr);
}

std::optional<std::vector<std::pair<Symbol, std::uint32_t>>> PpmModel::successors(
    std::span<const Symbol> context) const {
  auto node = find(context);
  if (!node) return std::nullopt;
  std::vector<std::pair<Symbol, std::uint32_t>> out;
  for (std::uint32_t c : nodes_[*node].children) out.emplace_back(nodes_[c].symbol, nodes_[c].count);
  return out;
}

bool PpmModel::check_invariants() const {
  // Depth-first walk carrying the path string so suffixes can be looked up.
  struct Frame {
    std::uint32_t node;
    std::size_t depth;
  };
  std::vector<Frame> stack{{kRoot, 0}};
  std::vector<Symbol> path;
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    path.resize(f.depth);
    if (f.node != kRoot) {
      path.push_back(nodes_[f.node].symbol);
      if (nodes_[f.node].count < 1) return false;
      if (nodes_[f.node].symbol >= alphabet_size_) return false;
      if (path.size() > static_cast<std::size_t>(order_) + 1) return false;
      if (path.size() > 1 && !find(std::span<const Symbol>(path).subspan(1))) return false;
    }
    const auto& kids = nodes_[f.node].children;
    for (std::size_t i = 1; i < kids.size(); ++i) {
      if (nodes_[kids[i - 1]].symbol >= nodes_[kids[i]].symbol) return false;
    }
    for (std::uint32_t c : kids) stack.push_back({c, path.size()});
  }
  return true;
}

std::vector<std::uint8_t> PpmModel::snapshot() const {
  std::vector<std::uint8_t> out(std::begin(kSnapshotMagic), std::end(kSnapshotMagic));
  out.push_back(kSnapshotVersion);
  out.push_back(static_cast<std::uint8_t>(order_));
  varint::put(out, alphabet_size_);
  varint::put(out, nodes_[kRoot].children.size());
  std::vector<std::uint32_t> stack(nodes_[kRoot].children.rbegin(), nodes_[kRoot].children.rend());
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    varint::put(out, n.symbol);
    varint::put(out, n.count);
    varint::put(out, n.children.size());
    stack.insert(stack.end(), n.children.rbegin(), n.children.rend());
  }
  return out;
}

PpmModel PpmModel::from_snapshot(std::span<const std::uint8_t> bytes) {
  varint::Reader in(bytes);
  for (std::uint8_t m : kSnapshotMagic) {
    if (in.byte() != m) throw DecodeError("not a model snapshot (bad magic)");
  }
  const std::uint8_t version = in.byte();
  if (version != kSnapshotVersion) {
    throw DecodeError("unsupported snapshot version " + std::to_string(version));
  }
  const int order = in.byte();
  const std::uint64_t alphabet_size = in.uvarint();
  if (order > kMaxOrder || alphabet_size < 2 || alphabet_size > 0xFFFF) {
    throw DecodeError("snapshot header out of range");
  }
  PpmModel model(order, static_cast<std::size_t>(alphabet_size));

  struct Pending {
    std::uint32_t parent;
    std::uint64_t children_left;
    std::size_t depth;
  };
  std::vector<Pending> stack{{kRoot, in.uvarint(), 0}};
  while (!stack.empty()) {
    if (stack.back().children_left == 0) {
      stack.pop_back();
      continue;
    }
    --stack.back().children_left;
    const Pending parent = stack.back();
    const std::uint64_t symbol = in.uvarint();
    const std::uint64_t count = in.uvarint();
    const std::uint64_t kids = in.uvarint();
    if (symbol >= alphabet_size || count == 0 || count > 0xFFFFFFFFu) {
      throw DecodeError("snapshot node out of range");
    }
    if (parent.depth + 1 > static_cast<std::size_t>(order) + 1) {
      throw DecodeError("snapshot trie deeper than its order");
    }
    auto& siblings = model.nodes_[parent.parent].children;
    if (!siblings.empty() && model.nodes_[siblings.back()].symbol >= symbol) {
      throw DecodeError("snapshot children not in symbol order");
    }
    const auto idx = static_cast<std::uint32_t>(model.nodes_.size());
    model.nodes_.push_back(Node{static_cast<Symbol>(symbol), static_cast<std::uint32_t>(count), {}});
    model.nodes_[parent.parent].children.push_back(idx);
    stack.push_back({idx, kids, parent.depth + 1});
  }
  if (in.remaining() != 0) throw DecodeError("trailing bytes after snapshot");
  if (!model.check_invariants()) throw DecodeError("snapshot violates trie invariants");
  return model;
}

PpmModel new_model(int order, const Alphabet& alphabet) { return PpmModel(order, alphabet.size()); }

double cross_entropy(PpmModel& model, std::span<const Symbol> text, bool adapt) {
  if (text.empty()) throw DomainError("cross entropy of empty text");
  std::vector<UndoToken> tokens;
  if (adapt) tokens.reserve(text.size());
  double bits = 0.0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto ctx = text.first(i);
    bits -= std::log2(model.predict(ctx)[text[i]]);
    if (adapt) tokens.push_back(model.observe(ctx, text[i]));
  }
  while (!tokens.empty()) {
    model.rollback(std::move(tokens.back()));
    tokens.pop_back();
  }
  return bits / static_cast<double>(text.size());
}

}  // namespace zw
