#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lwfc/errors.hpp"

namespace lwfc {

// Truncated unary codeword lengths: index n < N-1 codes as n ones plus
// a terminating zero (n+1 bits); the top index N-1 drops the
// terminator, so b_n = min(n+1, N-1). N=4 gives {0, 10, 110, 111} with
// lengths [1,2,3,3].
struct CodewordTable {
    std::uint32_t n_bins = 0;
    std::vector<std::uint32_t> lengths;
};

inline CodewordTable codeword_lengths(std::uint32_t n_bins) {
    if (n_bins < 2) throw InvalidArgument("binarization needs at least 2 bins");
    CodewordTable table;
    table.n_bins = n_bins;
    table.lengths.resize(n_bins);
    for (std::uint32_t n = 0; n < n_bins; ++n)
        table.lengths[n] = std::min(n + 1, n_bins - 1);
    return table;
}

inline std::vector<std::uint8_t> binarize(std::uint32_t index, std::uint32_t n_bins) {
    if (n_bins < 2) throw InvalidArgument("binarization needs at least 2 bins");
    if (index >= n_bins) throw InvalidArgument("bin index out of range");
    std::vector<std::uint8_t> bits(index, std::uint8_t{1});
    if (index < n_bins - 1) bits.push_back(0);
    return bits;
}

// Inverse of binarize. `next_bit` yields one coded bit per call and is
// expected to throw when the stream runs out mid-codeword.
template <typename BitSource>
inline std::uint32_t debinarize(BitSource&& next_bit, std::uint32_t n_bins) {
    if (n_bins < 2) throw InvalidArgument("binarization needs at least 2 bins");
    std::uint32_t ones = 0;
    while (ones < n_bins - 1 && next_bit() != 0) ++ones;
    return ones;
}

} // namespace lwfc
