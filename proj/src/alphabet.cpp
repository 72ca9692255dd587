#include "zoomwrite/alphabet.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "zoomwrite/error.hpp"

namespace zw {
namespace {

char32_t fold_case(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp - U'A' + U'a';
  return cp;
}

bool is_space_or_control(char32_t cp) {
  return cp <= 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F) || cp == 0xA0;
}

std::string trim_right(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min_cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min_cp = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min_cp = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min_cp = 0x10000;
    } else {
      throw CorpusDecodeError(i, "invalid lead byte");
    }
    if (i + len > n) throw CorpusDecodeError(i, "truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) throw CorpusDecodeError(i + k, "invalid continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min_cp) throw CorpusDecodeError(i, "overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw CorpusDecodeError(i, "invalid code point");
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

Alphabet Alphabet::standard() {
  std::vector<Entry> entries;
  for (char c = 'a'; c <= 'z'; ++c) entries.push_back({std::string(1, c), false});
  entries.push_back({" ", true});
  return from_entries(entries);
}

Alphabet Alphabet::from_entries(const std::vector<Entry>& entries) {
  if (entries.size() < 2) throw InvalidAlphabetError("alphabet needs at least two symbols");
  if (entries.size() > 0xFFFF) throw InvalidAlphabetError("alphabet too large");

  Alphabet a;
  std::unordered_set<char32_t> seen;
  std::optional<Symbol> sep;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    std::u32string cps;
    try {
      cps = decode_utf8(e.glyph);
    } catch (const CorpusDecodeError&) {
      throw InvalidAlphabetError("glyph " + std::to_string(i) + " is not valid UTF-8");
    }
    if (cps.size() != 1) {
      throw InvalidAlphabetError("glyph " + std::to_string(i) + " must be exactly one character");
    }
    const char32_t cp = cps[0];
    if (!seen.insert(cp).second) throw InvalidAlphabetError("duplicate glyph '" + e.glyph + "'");
    if (fold_case(cp) != cp) {
      throw InvalidAlphabetError("glyph '" + e.glyph + "' is upper case; alphabets are lower case");
    }
    const auto idx = static_cast<Symbol>(i);
    if (e.separator) {
      if (sep) throw InvalidAlphabetError("more than one separator designated");
      sep = idx;
    } else {
      if (is_space_or_control(cp)) {
        throw InvalidAlphabetError("whitespace glyph must be the separator");
      }
      a.letters_.emplace(cp, idx);
    }
    a.glyphs_.push_back(e.glyph);
  }
  if (!sep) throw InvalidAlphabetError("no separator designated");
  a.separator_ = *sep;
  return a;
}

std::optional<Symbol> Alphabet::letter_of(char32_t cp) const {
  auto it = letters_.find(cp);
  if (it == letters_.end()) return std::nullopt;
  return it->second;
}

std::string Alphabet::render(std::span<const Symbol> symbols) const {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) {
    if (s == separator_) {
      out.push_back(' ');
    } else {
      out += glyphs_.at(s);
    }
  }
  return out;
}

Alphabet build_alphabet(const std::optional<AlphabetSpec>& spec) {
  if (!spec) return Alphabet::standard();
  return Alphabet::from_entries(*spec);
}

Alphabet parse_alphabet(std::istream& in) {
  AlphabetSpec entries;
  std::string line;
  while (std::getline(in, line)) {
    line = trim_right(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "sep" || line.rfind("sep ", 0) == 0) {
      std::string glyph = line.size() > 4 ? line.substr(4) : std::string(" ");
      if (glyph == "space") glyph = " ";
      entries.push_back({glyph, true});
    } else {
      entries.push_back({line, false});
    }
  }
  return Alphabet::from_entries(entries);
}

Alphabet load_alphabet_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open alphabet file " + path.string());
  return parse_alphabet(in);
}

SymbolSeq normalize_text(std::string_view raw, const Alphabet& alphabet) {
  SymbolSeq out;
  out.reserve(raw.size());
  bool pending_separator = false;
  for (char32_t cp : decode_utf8(raw)) {
    if (auto s = alphabet.letter_of(fold_case(cp))) {
      if (pending_separator && !out.empty()) out.push_back(alphabet.separator());
      pending_separator = false;
      out.push_back(*s);
    } else {
      pending_separator = true;
    }
  }
  return out;
}

Corpus load_corpus(std::istream& source, const Alphabet& alphabet) {
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  Corpus c;
  c.chars_before = decode_utf8(bytes).size();
  c.symbols = normalize_text(bytes, alphabet);
  c.chars_after = c.symbols.size();
  return c;
}

Corpus load_corpus_file(const std::filesystem::path& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus " + path.string());
  return load_corpus(in, alphabet);
}

}  // namespace zw
