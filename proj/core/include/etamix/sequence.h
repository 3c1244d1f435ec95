#ifndef ETAMIX_SEQUENCE_H_
#define ETAMIX_SEQUENCE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace etamix {

using Symbol = std::uint32_t;
using Sequence = std::vector<Symbol>;

// Entry cap applied to every dense table the library allocates.
struct SizeGuard {
  static constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 24;
  std::size_t max_entries = kDefaultMaxEntries;
};

// Returns radix^length, throwing SizeGuardError (naming the exponent) when
// it exceeds the guard's cap.
std::size_t checked_power(std::size_t radix, std::size_t length,
                          const SizeGuard& guard, const std::string& what);

// radix^length without a guard; saturates at SIZE_MAX.
std::size_t saturating_power(std::size_t radix, std::size_t length);

// Mixed-radix codec for fixed-length sequences. Position 0 is the most
// significant digit, so every prefix addresses a contiguous block.
class SequenceCodec {
 public:
  SequenceCodec(std::size_t radix, std::size_t length);

  std::size_t radix() const { return radix_; }
  std::size_t length() const { return length_; }
  std::size_t size() const { return size_; }

  std::size_t encode(std::span<const Symbol> seq) const;
  Sequence decode(std::size_t index) const;
  void decode_into(std::size_t index, std::span<Symbol> out) const;

 private:
  std::size_t radix_;
  std::size_t length_;
  std::size_t size_;
};

}  // namespace etamix

#endif  // ETAMIX_SEQUENCE_H_
