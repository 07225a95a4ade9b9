#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lwfc/detail/byte_io.hpp"
#include "lwfc/errors.hpp"
#include "lwfc/types.hpp"

namespace lwfc {

// .ftns tensor file: "FTNS", version 0x01, dtype byte (0 = float32),
// ndim byte, ndim u32 dims, then the row-major float32 payload. All
// integers and floats little-endian.

inline constexpr char kTensorMagic[4] = {'F', 'T', 'N', 'S'};
inline constexpr std::uint8_t kTensorVersion = 0x01;
inline constexpr std::uint8_t kTensorDtypeF32 = 0x00;

inline std::vector<std::uint8_t> serialize_tensor(const FeatureTensor& t) {
    std::vector<std::uint8_t> out;
    out.reserve(7 + 4 * t.dims().size() + 4 * t.data().size());
    out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
    detail::put_u8(out, kTensorVersion);
    detail::put_u8(out, kTensorDtypeF32);
    detail::put_u8(out, static_cast<std::uint8_t>(t.dims().size()));
    for (std::uint32_t d : t.dims()) detail::put_u32le(out, d);
    for (float v : t.data()) detail::put_f32le(out, v);
    return out;
}

inline FeatureTensor parse_tensor(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kTensorMagic)))
        throw FormatError("not a tensor file (bad magic)");
    if (r.u8() != kTensorVersion) throw FormatError("unsupported tensor file version");
    if (r.u8() != kTensorDtypeF32) throw FormatError("unsupported tensor dtype");
    const std::uint8_t ndim = r.u8();
    if (ndim == 0) throw FormatError("tensor rank must be positive");
    std::vector<std::uint32_t> dims(ndim);
    std::uint64_t count = 1;
    for (auto& d : dims) {
        d = r.u32le();
        if (d == 0) throw FormatError("tensor dimensions must be positive");
        count *= d;
    }
    if (r.remaining() != count * 4)
        throw CorruptStreamError("tensor payload length does not match dims");
    std::vector<float> data(count);
    for (auto& v : data) v = r.f32le();
    return FeatureTensor(std::move(dims), std::move(data)); // rejects NaN/Inf
}

inline FeatureTensor load_tensor(const std::filesystem::path& path) {
    return parse_tensor(detail::read_file(path));
}

inline void save_tensor(const FeatureTensor& t, const std::filesystem::path& path) {
    detail::write_file(path, serialize_tensor(t));
}

// Raw float32 import for interop with tooling that can only dump flat
// buffers; the caller supplies the dims the file does not carry.
inline FeatureTensor load_raw_f32(const std::filesystem::path& path,
                                  std::vector<std::uint32_t> dims) {
    auto bytes = detail::read_file(path);
    if (bytes.size() % 4 != 0) throw FormatError("raw f32 file size not a multiple of 4");
    std::vector<float> data(bytes.size() / 4);
    detail::ByteReader r(bytes);
    for (auto& v : data) v = r.f32le();
    return FeatureTensor(std::move(dims), std::move(data));
}

// Zero-spike + half-normal generator approximating the post-activation
// statistics at a split layer: a large mass exactly at zero and a
// positive tail. Drawing through an explicit mt19937_64 mapping keeps
// the output identical across standard libraries.
struct SyntheticSpec {
    std::vector<std::uint32_t> dims;
    double zero_fraction = 0.0; // in [0, 1)
    double scale = 1.0;         // half-normal sigma
    std::uint64_t seed = 0;

    void validate() const {
        if (!(zero_fraction >= 0.0 && zero_fraction < 1.0))
            throw InvalidArgument("zero_fraction must be in [0, 1)");
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw InvalidArgument("scale must be positive and finite");
    }
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(std::mt19937_64& rng) {
    // Box-Muller, cosine branch only; u1 shifted away from zero.
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace detail

inline FeatureTensor generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    if (spec.dims.empty()) throw InvalidArgument("synthetic tensor needs dims");
    std::uint64_t total = 1;
    for (std::uint32_t d : spec.dims) {
        if (d == 0) throw InvalidArgument("tensor dimensions must be positive");
        total *= d;
    }
    std::mt19937_64 rng(spec.seed);
    std::vector<float> data;
    data.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i) {
        const double u = detail::uniform01(rng);
        if (u < spec.zero_fraction) {
            data.push_back(0.0f);
        } else {
            const double g = detail::standard_normal(rng);
            data.push_back(static_cast<float>(spec.scale * std::abs(g)));
        }
    }
    return FeatureTensor(spec.dims, std::move(data));
}

// Equal-width bucket counts over a range, with out-of-range tallies
// kept separately. An element exactly at c_max lands in the top bucket.
struct Histogram {
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    std::uint64_t total() const {
        std::uint64_t sum = underflow + overflow;
        for (auto c : counts) sum += c;
        return sum;
    }
};

inline Histogram histogram(const FeatureTensor& t, std::uint32_t n_buckets,
                           const ClipRange& range) {
    if (n_buckets < 1) throw InvalidArgument("histogram needs at least 1 bucket");
    range.validate();
    Histogram h;
    h.counts.assign(n_buckets, 0);
    const double lo = range.c_min;
    const double hi = range.c_max;
    const double inv_width = n_buckets / (hi - lo);
    for (float v : t.data()) {
        if (v < lo) {
            ++h.underflow;
        } else if (v > hi) {
            ++h.overflow;
        } else {
            auto idx = static_cast<std::uint64_t>((v - lo) * inv_width);
            if (idx >= n_buckets) idx = n_buckets - 1;
            ++h.counts[static_cast<std::size_t>(idx)];
        }
    }
    return h;
}

} // namespace lwfc
