#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zoomwrite/alphabet.hpp"
#include "zoomwrite/ppm_model.hpp"

namespace zw {

// Integer allocation of a total among the symbols; every weight is at least 1.
struct QuantizedDist {
  std::vector<std::uint64_t> weights;
  std::uint64_t total = 0;

  // Sum of the weights of symbols below s.
  std::uint64_t cumulative(Symbol s) const;
};

// Floors p_i * total, raises zero weights to 1, then settles the difference
// one unit at a time: a shortfall goes to the largest fractional remainders,
// an excess is taken from the smallest remainders among weights above 1
// (ties to the lower symbol index). Throws QuantizationError when total is
// smaller than the alphabet.
QuantizedDist quantize(const Distribution& dist, std::uint64_t total);

// Per-step frequency total used by the coder.
inline constexpr std::uint64_t kCoderTotal = std::uint64_t{1} << 16;

struct Bitstream {
  std::uint64_t symbol_count = 0;
  std::uint64_t bit_length = 0;
  std::vector<std::uint8_t> payload;  // MSB first, zero padded

  bool bit(std::uint64_t i) const { return (payload[i / 8] >> (7 - i % 8)) & 1; }

  // "ZWAC", version byte, varint symbol count, varint bit length, payload.
  std::vector<std::uint8_t> to_bytes() const;
  // Throws DecodeError on bad magic, truncation, trailing data, or nonzero
  // padding bits.
  static Bitstream from_bytes(std::span<const std::uint8_t> bytes);

  bool operator==(const Bitstream&) const = default;
};

// Adaptive arithmetic coding under the model: each symbol is coded with
// quantize(predict(model, history), kCoderTotal) and then observed. The
// model is restored before returning.
Bitstream encode(PpmModel& model, std::span<const Symbol> text);

// Inverse of encode under a model with the same snapshot. A different model
// decodes without error but yields unspecified symbols. Throws DecodeError
// when the payload is shorter than its recorded bit length or the header
// contradicts the payload.
SymbolSeq decode(PpmModel& model, const Bitstream& stream);

}  // namespace zw
