#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lwfc/errors.hpp"
#include "lwfc/types.hpp"

namespace lwfc {

// N equally spaced reconstruction levels over a clip range. N does not
// need to be a power of two.
struct UniformQuantizer {
    ClipRange range;
    std::uint32_t levels = 2;

    void validate() const {
        range.validate();
        if (levels < 2) throw InvalidArgument("uniform quantizer needs at least 2 levels");
    }
};

// Explicit scalar quantizer: strictly increasing representative levels
// and the N-1 decision thresholds between them. Thresholds are
// encoder-side only; a decoder needs just the levels.
struct Codebook {
    std::vector<double> levels;
    std::vector<double> thresholds;

    std::size_t size() const { return levels.size(); }

    void validate() const {
        if (levels.size() < 2) throw InvalidArgument("codebook needs at least 2 levels");
        if (thresholds.size() != levels.size() - 1)
            throw InvalidArgument("codebook needs exactly N-1 thresholds");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (!std::isfinite(levels[i])) throw InvalidArgument("codebook level not finite");
            if (i > 0 && !(levels[i - 1] < levels[i]))
                throw InvalidArgument("codebook levels must be strictly increasing");
        }
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (!std::isfinite(thresholds[i])) throw InvalidArgument("codebook threshold not finite");
            if (i > 0 && thresholds[i] < thresholds[i - 1])
                throw InvalidArgument("codebook thresholds must be non-decreasing");
            if (thresholds[i] < levels[i] || thresholds[i] > levels[i + 1])
                throw InvalidArgument("threshold t_n must lie in [level_{n-1}, level_n]");
        }
    }
};

// Index of the bin x falls into: round((x_clp - c_min) / (c_max - c_min) * (N-1)),
// halfway cases rounding away from zero. The scaled value is always
// non-negative, so away-from-zero is floor(v + 0.5); this is spelled
// out rather than relying on the platform rounding mode.
inline std::uint32_t quantize_uniform(float x, const UniformQuantizer& q) {
    const double xc = clip(static_cast<double>(x), q.range);
    const double v = (xc - q.range.c_min) / (static_cast<double>(q.range.c_max) - q.range.c_min)
                     * (q.levels - 1);
    const auto n = static_cast<std::uint32_t>(std::floor(v + 0.5));
    return std::min(n, q.levels - 1);
}

// Reconstruction at c_min + n * (c_max - c_min)/(N-1). The endpoint
// bins reproduce the clip bounds exactly, mirroring the boundary
// pinning the designed quantizers use.
inline double dequantize_uniform(std::uint32_t n, const UniformQuantizer& q) {
    if (n >= q.levels) throw InvalidArgument("bin index out of range");
    if (n == 0) return q.range.c_min;
    if (n == q.levels - 1) return q.range.c_max;
    const double s = static_cast<double>(n) / (q.levels - 1);
    return q.range.c_min + s * (static_cast<double>(q.range.c_max) - q.range.c_min);
}

// Threshold scan: the unique n with t_n <= x_clp < t_{n+1} (sentinels
// t_0 = -inf, t_N = +inf). A sample exactly on a threshold goes to the
// upper bin; the rule is arbitrary but fixed for encoder determinism.
inline std::uint32_t quantize_codebook(float x, const Codebook& cb, const ClipRange& range) {
    const double xc = clip(static_cast<double>(x), range);
    auto it = std::upper_bound(cb.thresholds.begin(), cb.thresholds.end(), xc);
    return static_cast<std::uint32_t>(it - cb.thresholds.begin());
}

inline double dequantize_codebook(std::uint32_t n, const Codebook& cb) {
    if (n >= cb.levels.size()) throw InvalidArgument("bin index out of range");
    return cb.levels[n];
}

} // namespace lwfc
