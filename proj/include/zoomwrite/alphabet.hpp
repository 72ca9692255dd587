#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace zw {

using Symbol = std::uint16_t;
using SymbolSeq = std::vector<Symbol>;

// Ordered symbol set. Every glyph is a single Unicode code point; exactly one
// symbol is the word separator.
class Alphabet {
 public:
  struct Entry {
    std::string glyph;  // UTF-8, one code point
    bool separator = false;
  };

  // a..z followed by the separator (rendered as a space).
  static Alphabet standard();

  // Throws InvalidAlphabetError on fewer than two entries, duplicate or
  // malformed glyphs, or a separator count other than one.
  static Alphabet from_entries(const std::vector<Entry>& entries);

  std::size_t size() const { return glyphs_.size(); }
  Symbol separator() const { return separator_; }
  const std::string& glyph(Symbol s) const { return glyphs_.at(s); }
  const std::vector<std::string>& glyphs() const { return glyphs_; }

  // Symbol for an already case-folded code point, if it is a non-separator
  // glyph of this alphabet.
  std::optional<Symbol> letter_of(char32_t cp) const;

  bool contains(Symbol s) const { return s < glyphs_.size(); }

  // Glyph concatenation with the separator rendered as a plain space.
  std::string render(std::span<const Symbol> symbols) const;

  bool operator==(const Alphabet& other) const {
    return glyphs_ == other.glyphs_ && separator_ == other.separator_;
  }

 private:
  Alphabet() = default;

  std::vector<std::string> glyphs_;
  Symbol separator_ = 0;
  std::unordered_map<char32_t, Symbol> letters_;
};

using AlphabetSpec = std::vector<Alphabet::Entry>;

// Default alphabet when no spec is given.
Alphabet build_alphabet(const std::optional<AlphabetSpec>& spec = std::nullopt);

// Alphabet file: one glyph per line, `sep <glyph>` marks the separator
// (`sep` alone or `sep space` means a space), `#` starts a comment line.
Alphabet parse_alphabet(std::istream& in);
Alphabet load_alphabet_file(const std::filesystem::path& path);

// Lower-cases A-Z, maps every maximal run of characters outside the
// alphabet's letters to one separator, and drops leading/trailing
// separators. Throws CorpusDecodeError on malformed UTF-8.
SymbolSeq normalize_text(std::string_view raw, const Alphabet& alphabet);

struct Corpus {
  SymbolSeq symbols;
  std::size_t chars_before = 0;  // code points in the raw stream
  std::size_t chars_after = 0;   // symbols after normalization
};

Corpus load_corpus(std::istream& source, const Alphabet& alphabet);
Corpus load_corpus_file(const std::filesystem::path& path, const Alphabet& alphabet);

// Decodes UTF-8, throwing CorpusDecodeError with the offending byte offset.
std::u32string decode_utf8(std::string_view bytes);

}  // namespace zw
