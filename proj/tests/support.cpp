#include "support.hpp"

#include <map>
#include <stdexcept>

namespace zw::test {

std::string data_path(const std::string& name) { return std::string(ZW_TEST_DATA_DIR) + "/" + name; }

const Alphabet& alphabet27() {
  static const Alphabet a = build_alphabet();
  return a;
}

const Split& novel_split() {
  static const Split split = [] {
    const SymbolSeq all = load_corpus_file(data_path("alice29.txt"), alphabet27()).symbols;
    std::size_t mid = all.size() / 2;
    const Symbol sep = alphabet27().separator();
    while (mid < all.size() && all[mid] != sep) ++mid;
    Split s;
    s.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid));
    s.heldout.assign(all.begin() + static_cast<std::ptrdiff_t>(mid) + 1, all.end());
    return s;
  }();
  return split;
}

const PpmModel& trained(int order) {
  static std::map<int, PpmModel> cache;
  auto it = cache.find(order);
  if (it == cache.end()) {
    PpmModel m = new_model(order, alphabet27());
    m.train(novel_split().train);
    it = cache.emplace(order, std::move(m)).first;
  }
  return it->second;
}

SymbolSeq passage(std::size_t offset, std::size_t len) {
  const SymbolSeq& h = novel_split().heldout;
  const Symbol sep = alphabet27().separator();
  std::size_t start = offset;
  while (start < h.size() && h[start] != sep) ++start;
  ++start;
  while (start + len < h.size() && (h[start + len - 1] == sep || h[start + len] != sep)) ++start;
  if (start + len > h.size()) throw std::out_of_range("passage beyond held-out text");
  return SymbolSeq(h.begin() + static_cast<std::ptrdiff_t>(start),
                   h.begin() + static_cast<std::ptrdiff_t>(start + len));
}

SymbolSeq random_symbols(std::mt19937_64& rng, std::size_t len, std::size_t alphabet_size) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet_size) - 1);
  SymbolSeq out(len);
  for (Symbol& s : out) s = static_cast<Symbol>(pick(rng));
  return out;
}

SymbolSeq random_words(std::mt19937_64& rng, std::size_t len, const Alphabet& alphabet) {
  const Symbol sep = alphabet.separator();
  std::uniform_int_distribution<int> letter(0, static_cast<int>(alphabet.size()) - 2);
  std::uniform_int_distribution<int> roll(0, 5);
  SymbolSeq out;
  while (out.size() < len) {
    const bool can_split = !out.empty() && out.back() != sep && out.size() + 1 < len;
    if (can_split && roll(rng) == 0) {
      out.push_back(sep);
    } else {
      Symbol s = static_cast<Symbol>(letter(rng));
      if (s >= sep) ++s;
      out.push_back(s);
    }
  }
  return out;
}

PpmModel random_trained_model(std::mt19937_64& rng) {
  const SymbolSeq& text = novel_split().train;
  std::uniform_int_distribution<int> order(0, 6);
  std::uniform_int_distribution<std::size_t> length(0, 5000);
  const std::size_t n = length(rng);
  std::uniform_int_distribution<std::size_t> start(0, text.size() - n);
  const std::size_t s = start(rng);
  PpmModel m = new_model(order(rng), alphabet27());
  m.train(std::span(text).subspan(s, n));
  return m;
}

}  // namespace zw::test
