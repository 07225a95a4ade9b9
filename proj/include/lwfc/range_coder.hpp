#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lwfc/errors.hpp"

namespace lwfc {

// Binary range coder, normative for version-1 payloads.
//
// 32-bit range register, 64-bit low accumulator with deferred carry
// propagation (a pending run of 0xFF bytes collapses when the carry
// resolves). The interval is split multiplicatively:
//
//     r1 = (range >> 16) * p_one
//
// where p_one is the 16-bit probability of a one bit. A one takes the
// lower subinterval [low, low + r1), a zero the upper. Renormalization
// shifts a byte out whenever range drops below 2^24, so r1 is never
// zero for p_one >= 1. The encoder flushes five bytes at the end; the
// decoder primes its 32-bit code window with the same five bytes (the
// first carries no information beyond a possible carry).

inline constexpr std::uint32_t kRangeTop = 1u << 24;
inline constexpr std::uint32_t kProbOne = 1u << 16;
inline constexpr std::uint16_t kProbHalf = 1u << 15;
inline constexpr int kAdaptShift = 5;

// Adaptive probability-of-one state. Updates keep the probability in
// [1, 65535]; the boundary bins of the update rule are sticky rather
// than saturating to 0 or 65536, which would break the interval split.
class BitContext {
public:
    std::uint16_t p_one() const { return p_; }

    void update(int bit) {
        if (bit)
            p_ = static_cast<std::uint16_t>(p_ + ((kProbOne - p_) >> kAdaptShift));
        else
            p_ = static_cast<std::uint16_t>(p_ - (p_ >> kAdaptShift));
    }

private:
    std::uint16_t p_ = kProbHalf;
};

class RangeEncoder {
public:
    void encode_bit(int bit, std::uint16_t p_one) {
        const std::uint32_t r1 = (range_ >> 16) * p_one;
        if (bit) {
            range_ = r1;
        } else {
            low_ += r1;
            range_ -= r1;
        }
        while (range_ < kRangeTop) {
            shift_low();
            range_ <<= 8;
        }
    }

    // Flushes the remaining low bits; the encoder is spent afterwards.
    std::vector<std::uint8_t> finish() {
        for (int i = 0; i < 5; ++i) shift_low();
        return std::move(out_);
    }

    void reserve(std::size_t bytes) { out_.reserve(bytes); }

private:
    void shift_low() {
        if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
            const auto carry = static_cast<std::uint8_t>(low_ >> 32);
            out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
            while (--pending_ != 0)
                out_.push_back(static_cast<std::uint8_t>(0xFFu + carry));
            cache_ = static_cast<std::uint8_t>(low_ >> 24);
        }
        ++pending_;
        low_ = (low_ & 0x00FFFFFFu) << 8;
    }

    std::uint64_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint8_t cache_ = 0;
    std::uint64_t pending_ = 1;
    std::vector<std::uint8_t> out_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint8_t> payload) : payload_(payload) {
        for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
    }

    int decode_bit(std::uint16_t p_one) {
        const std::uint32_t r1 = (range_ >> 16) * p_one;
        int bit;
        if (code_ < r1) {
            bit = 1;
            range_ = r1;
        } else {
            bit = 0;
            code_ -= r1;
            range_ -= r1;
        }
        while (range_ < kRangeTop) {
            code_ = (code_ << 8) | next_byte();
            range_ <<= 8;
        }
        return bit;
    }

    std::size_t bytes_consumed() const { return pos_; }

private:
    std::uint8_t next_byte() {
        if (pos_ >= payload_.size())
            throw CorruptStreamError("arithmetic-coded payload truncated");
        return payload_[pos_++];
    }

    std::span<const std::uint8_t> payload_;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint32_t code_ = 0;
    std::size_t pos_ = 0;
};

} // namespace lwfc
