#include "zoomwrite/arithmetic_coder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "zoomwrite/error.hpp"
#include "zoomwrite/varint.hpp"

namespace zw {
namespace {

constexpr std::uint8_t kStreamMagic[4] = {'Z', 'W', 'A', 'C'};
constexpr std::uint8_t kStreamVersion = 1;

// 32-bit code registers held in 64-bit words.
constexpr std::uint64_t kTop = (std::uint64_t{1} << 32) - 1;
constexpr std::uint64_t kHalf = std::uint64_t{1} << 31;
constexpr std::uint64_t kFirstQuarter = std::uint64_t{1} << 30;
constexpr std::uint64_t kThirdQuarter = kHalf + kFirstQuarter;

static_assert(kCoderTotal <= kFirstQuarter, "frequency total must leave two bits of headroom");

class BitWriter {
 public:
  void put(bool bit) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80 >> (bits_ % 8));
    ++bits_;
  }
  void put_with_follow(bool bit, std::uint64_t& follow) {
    put(bit);
    for (; follow > 0; --follow) put(!bit);
  }
  std::uint64_t size() const { return bits_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

// Reads zeros past the recorded length, matching the zero padding the
// encoder's termination relies on.
class BitReader {
 public:
  explicit BitReader(const Bitstream& s) : stream_(s) {}
  std::uint64_t get() { return pos_ < stream_.bit_length ? stream_.bit(pos_++) : (++pos_, 0); }

 private:
  const Bitstream& stream_;
  std::uint64_t pos_ = 0;
};

// Rolls back every observation made during a coding pass, including when
// the pass exits by exception.
class ObservationScope {
 public:
  explicit ObservationScope(PpmModel& model) : model_(model) {}
  ~ObservationScope() {
    while (!tokens_.empty()) {
      model_.rollback(std::move(tokens_.back()));
      tokens_.pop_back();
    }
  }
  ObservationScope(const ObservationScope&) = delete;
  ObservationScope& operator=(const ObservationScope&) = delete;

  void observe(std::span<const Symbol> context, Symbol s) { tokens_.push_back(model_.observe(context, s)); }

 private:
  PpmModel& model_;
  std::vector<UndoToken> tokens_;
};

}  // namespace

std::uint64_t QuantizedDist::cumulative(Symbol s) const {
  return std::accumulate(weights.begin(), weights.begin() + s, std::uint64_t{0});
}

QuantizedDist quantize(const Distribution& dist, std::uint64_t total) {
  const std::size_t n = dist.size();
  if (total < n) {
    throw QuantizationError("total " + std::to_string(total) + " smaller than alphabet size " +
                            std::to_string(n));
  }
  QuantizedDist q{std::vector<std::uint64_t>(n), total};
  std::vector<double> frac(n);
  std::vector<char> raised(n, 0);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = dist.probs[i] * static_cast<double>(total);
    const double whole = std::floor(scaled);
    q.weights[i] = static_cast<std::uint64_t>(whole);
    frac[i] = scaled - whole;
    if (q.weights[i] == 0) {
      q.weights[i] = 1;
      raised[i] = 1;
    }
    sum += static_cast<std::int64_t>(q.weights[i]);
  }
  std::int64_t diff = static_cast<std::int64_t>(total) - sum;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (diff > 0) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    std::erase_if(order, [&](std::size_t i) { return raised[i]; });
    if (order.empty()) {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
    }
    for (std::size_t k = 0; diff > 0; ++k, --diff) ++q.weights[order[k % order.size()]];
  } else if (diff < 0) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] < frac[b]; });
    // Feasible because total >= n: some weight stays above 1 while sum > total.
    for (std::size_t k = 0; diff < 0; ++k) {
      auto& w = q.weights[order[k % n]];
      if (w > 1) {
        --w;
        ++diff;
      }
    }
  }
  return q;
}

std::vector<std::uint8_t> Bitstream::to_bytes() const {
  std::vector<std::uint8_t> out(std::begin(kStreamMagic), std::end(kStreamMagic));
  out.push_back(kStreamVersion);
  varint::put(out, symbol_count);
  varint::put(out, bit_length);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bitstream Bitstream::from_bytes(std::span<const std::uint8_t> bytes) {
  varint::Reader in(bytes);
  for (std::uint8_t m : kStreamMagic) {
    if (in.byte() != m) throw DecodeError("not a compressed stream (bad magic)");
  }
  const std::uint8_t version = in.byte();
  if (version != kStreamVersion) throw DecodeError("unsupported stream version " + std::to_string(version));
  Bitstream s;
  s.symbol_count = in.uvarint();
  s.bit_length = in.uvarint();
  const std::uint64_t need = (s.bit_length + 7) / 8;
  if (in.remaining() < need) {
    throw DecodeError("truncated payload: " + std::to_string(in.remaining()) + " of " +
                      std::to_string(need) + " bytes present");
  }
  if (in.remaining() > need) throw DecodeError("trailing bytes after payload");
  auto body = in.take(need);
  s.payload.assign(body.begin(), body.end());
  if (s.bit_length % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFF >> (s.bit_length % 8));
    if (s.payload.back() & pad_mask) throw DecodeError("nonzero padding bits");
  }
  return s;
}

Bitstream encode(PpmModel& model, std::span<const Symbol> text) {
  Bitstream out;
  out.symbol_count = text.size();
  if (text.empty()) return out;

  ObservationScope scope(model);
  BitWriter bits;
  std::uint64_t low = 0;
  std::uint64_t high = kTop;
  std::uint64_t follow = 0;

  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto history = text.first(i);
    const QuantizedDist q = quantize(model.predict(history), kCoderTotal);
    const Symbol s = text[i];
    if (s >= q.weights.size()) throw DomainError("symbol index outside model alphabet");
    const std::uint64_t cum_lo = q.cumulative(s);
    const std::uint64_t cum_hi = cum_lo + q.weights[s];

    const std::uint64_t range = high - low + 1;
    high = low + range * cum_hi / q.total - 1;
    low = low + range * cum_lo / q.total;
    while (true) {
      if (high < kHalf) {
        bits.put_with_follow(false, follow);
      } else if (low >= kHalf) {
        bits.put_with_follow(true, follow);
        low -= kHalf;
        high -= kHalf;
      } else if (low >= kFirstQuarter && high < kThirdQuarter) {
        ++follow;
        low -= kFirstQuarter;
        high -= kFirstQuarter;
      } else {
        break;
      }
      low = 2 * low;
      high = 2 * high + 1;
    }
    scope.observe(history, s);
  }

  // Two bits (plus pending follow bits) select a quarter inside [low, high].
  ++follow;
  bits.put_with_follow(low >= kFirstQuarter, follow);

  out.bit_length = bits.size();
  out.payload = bits.take();
  return out;
}

SymbolSeq decode(PpmModel& model, const Bitstream& stream) {
  if (stream.payload.size() < (stream.bit_length + 7) / 8) {
    throw DecodeError("truncated payload");
  }
  if (stream.payload.size() > (stream.bit_length + 7) / 8) {
    throw DecodeError("payload longer than its recorded bit length");
  }
  if (stream.symbol_count == 0) {
    if (stream.bit_length != 0) throw DecodeError("empty stream carries payload bits");
    return {};
  }
  if (stream.bit_length < 2) throw DecodeError("payload too short for a terminated stream");

  ObservationScope scope(model);
  BitReader bits(stream);
  std::uint64_t low = 0;
  std::uint64_t high = kTop;
  std::uint64_t value = 0;
  for (int i = 0; i < 32; ++i) value = (value << 1) | bits.get();

  SymbolSeq out;
  out.reserve(stream.symbol_count);
  for (std::uint64_t i = 0; i < stream.symbol_count; ++i) {
    const QuantizedDist q = quantize(model.predict(out), kCoderTotal);
    const std::uint64_t range = high - low + 1;
    const std::uint64_t target = ((value - low + 1) * q.total - 1) / range;

    Symbol s = 0;
    std::uint64_t cum_lo = 0;
    while (cum_lo + q.weights[s] <= target) cum_lo += q.weights[s++];
    const std::uint64_t cum_hi = cum_lo + q.weights[s];

    high = low + range * cum_hi / q.total - 1;
    low = low + range * cum_lo / q.total;
    while (true) {
      if (high < kHalf) {
        // nothing to subtract
      } else if (low >= kHalf) {
        low -= kHalf;
        high -= kHalf;
        value -= kHalf;
      } else if (low >= kFirstQuarter && high < kThirdQuarter) {
        low -= kFirstQuarter;
        high -= kFirstQuarter;
        value -= kFirstQuarter;
      } else {
        break;
      }
      low = 2 * low;
      high = 2 * high + 1;
      value = 2 * value + bits.get();
    }
    scope.observe(out, s);
    out.push_back(s);
  }
  return out;
}

}  // namespace zw
