#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lwfc/errors.hpp"

namespace lwfc {

// Clipping interval applied to activations before quantization.
// Bounds are float because that is the precision carried by every
// container format; design code widens them to double losslessly.
struct ClipRange {
    float c_min = 0.0f;
    float c_max = 0.0f;

    void validate() const {
        if (!std::isfinite(c_min) || !std::isfinite(c_max))
            throw InvalidArgument("clip range must be finite");
        if (!(c_min < c_max))
            throw InvalidArgument("clip range requires c_min < c_max");
    }

    float width() const { return c_max - c_min; }
};

template <typename T>
inline T clip(T x, const ClipRange& range) {
    return std::min(std::max(x, static_cast<T>(range.c_min)), static_cast<T>(range.c_max));
}

// Dimensioned, immutable container of float32 activations in flat
// row-major order. NaN/Inf are rejected at construction: activations
// from a well-formed network are finite, and silently repairing them
// would mask upstream bugs.
class FeatureTensor {
public:
    FeatureTensor(std::vector<std::uint32_t> dims, std::vector<float> data)
        : dims_(std::move(dims)), data_(std::move(data)) {
        if (dims_.empty() || dims_.size() > 255)
            throw InvalidArgument("tensor rank must be in [1, 255]");
        std::uint64_t count = 1;
        for (std::uint32_t d : dims_) {
            if (d == 0) throw InvalidArgument("tensor dimensions must be positive");
            if (count > UINT64_MAX / d) throw InvalidArgument("tensor element count overflows");
            count *= d;
        }
        if (count != data_.size())
            throw InvalidArgument("tensor data length does not match product of dims");
        for (float v : data_)
            if (!std::isfinite(v))
                throw DataError("tensor contains NaN or Inf");
    }

    const std::vector<std::uint32_t>& dims() const { return dims_; }
    std::span<const float> data() const { return data_; }
    std::uint64_t element_count() const { return data_.size(); }

    bool same_shape(const FeatureTensor& other) const { return dims_ == other.dims_; }

private:
    std::vector<std::uint32_t> dims_;
    std::vector<float> data_;
};

} // namespace lwfc
