#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lwfc/binarization.hpp"
#include "lwfc/errors.hpp"
#include "lwfc/range_coder.hpp"

namespace lwfc {

// One adaptive context per truncated-unary bit position, so the coder
// learns a separate bias for "index >= 1", "index >= 2", ... Contexts
// start at p = 1/2 and are never shared across payloads: every tensor
// must be independently decodable.
class ContextSet {
public:
    explicit ContextSet(std::uint32_t n_bins) {
        if (n_bins < 2) throw InvalidArgument("context set needs at least 2 bins");
        contexts_.resize(n_bins - 1);
    }

    BitContext& operator[](std::uint32_t bit_position) { return contexts_[bit_position]; }
    std::size_t size() const { return contexts_.size(); }

private:
    std::vector<BitContext> contexts_;
};

// Binarizes each index and arithmetic-codes the bits against the
// per-position contexts. The payload is byte-aligned by the coder
// flush; the symbol count travels in the container header, not in-band.
inline std::vector<std::uint8_t> encode_indices(std::span<const std::uint32_t> indices,
                                                std::uint32_t n_bins) {
    ContextSet contexts(n_bins);
    RangeEncoder coder;
    coder.reserve(indices.size() / 4 + 16);
    const std::uint32_t top = n_bins - 1;
    for (std::uint32_t index : indices) {
        if (index >= n_bins) throw InvalidArgument("bin index out of range");
        for (std::uint32_t j = 0; j < top; ++j) {
            const int bit = j < index ? 1 : 0;
            coder.encode_bit(bit, contexts[j].p_one());
            contexts[j].update(bit);
            if (!bit) break;
        }
    }
    return coder.finish();
}

// Exact inverse of encode_indices; context evolution mirrors the
// encoder bit for bit. Decoded indices are bounded by the unary tree
// itself, so corruption surfaces as a truncation/trailing-bytes error
// or as wrong indices, never as an out-of-range index.
inline std::vector<std::uint32_t> decode_indices(std::span<const std::uint8_t> payload,
                                                 std::uint64_t count, std::uint32_t n_bins) {
    ContextSet contexts(n_bins);
    RangeDecoder coder(payload);
    std::vector<std::uint32_t> indices;
    indices.reserve(count);
    const std::uint32_t top = n_bins - 1;
    for (std::uint64_t m = 0; m < count; ++m) {
        std::uint32_t ones = 0;
        while (ones < top) {
            const int bit = coder.decode_bit(contexts[ones].p_one());
            contexts[ones].update(bit);
            if (!bit) break;
            ++ones;
        }
        indices.push_back(ones);
    }
    if (coder.bytes_consumed() != payload.size())
        throw CorruptStreamError("payload has trailing bytes after last symbol");
    return indices;
}

} // namespace lwfc
