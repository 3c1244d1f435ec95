#include "etamix/sequence.h"

#include <limits>

#include <fmt/format.h>

#include "etamix/errors.h"

namespace etamix {

std::size_t saturating_power(std::size_t radix, std::size_t length) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t result = 1;
  for (std::size_t k = 0; k < length; ++k) {
    if (radix != 0 && result > kMax / radix) return kMax;
    result *= radix;
  }
  return result;
}

std::size_t checked_power(std::size_t radix, std::size_t length,
                          const SizeGuard& guard, const std::string& what) {
  const std::size_t size = saturating_power(radix, length);
  if (size > guard.max_entries) {
    throw SizeGuardError(fmt::format(
        "{}: {}^{} entries exceeds the table cap of {} (set ETAMIX_SIZE_GUARD "
        "to raise it)",
        what, radix, length, guard.max_entries));
  }
  return size;
}

SequenceCodec::SequenceCodec(std::size_t radix, std::size_t length)
    : radix_(radix), length_(length), size_(saturating_power(radix, length)) {
  if (radix == 0) throw DimensionMismatch("empty alphabet");
}

std::size_t SequenceCodec::encode(std::span<const Symbol> seq) const {
  if (seq.size() != length_) throw DimensionMismatch("sequence length mismatch");
  std::size_t index = 0;
  for (Symbol s : seq) {
    if (s >= radix_) throw DimensionMismatch("symbol out of range");
    index = index * radix_ + s;
  }
  return index;
}

Sequence SequenceCodec::decode(std::size_t index) const {
  Sequence seq(length_);
  decode_into(index, seq);
  return seq;
}

void SequenceCodec::decode_into(std::size_t index, std::span<Symbol> out) const {
  for (std::size_t k = length_; k-- > 0;) {
    out[k] = static_cast<Symbol>(index % radix_);
    index /= radix_;
  }
}

}  // namespace etamix
