#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/ppm_model.hpp"

namespace zw::test {

// Normalized Alice text split in two halves at a word boundary.
struct Split {
  SymbolSeq train;
  SymbolSeq heldout;
};

const Alphabet& alphabet27();
const Split& novel_split();

// Order-N models trained on the first half; built once per process.
const PpmModel& trained(int order);

// First `len` symbols of the held-out half starting at the first word
// boundary at or after `offset`, trimmed so it neither starts nor ends
// with a separator.
SymbolSeq passage(std::size_t offset, std::size_t len);

// Random symbol strings with words separated by single separators.
SymbolSeq random_words(std::mt19937_64& rng, std::size_t len, const Alphabet& alphabet);
SymbolSeq random_symbols(std::mt19937_64& rng, std::size_t len, std::size_t alphabet_size);

// Order-k model trained on a random slice of the training half.
PpmModel random_trained_model(std::mt19937_64& rng);

std::string data_path(const std::string& name);

}  // namespace zw::test
