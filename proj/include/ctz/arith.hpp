#ifndef CTZ_ARITH_HPP
#define CTZ_ARITH_HPP

#include <cstdint>

#include "ctz/bitio.hpp"
#include "ctz/errors.hpp"

namespace ctz {

// 32-bit arithmetic coder with underflow counting and a two-bit flush.
// Symbols are given as cumulative frequency ranges [cum_lo, cum_hi) out of
// `total`; total must stay below 2^30 so the range never collapses.
class ArithmeticEncoder {
    static constexpr uint32_t HALF = 0x80000000u;
    static constexpr uint32_t QUARTER = 0x40000000u;
    static constexpr uint32_t THREEQ = 0xC0000000u;

public:
    explicit ArithmeticEncoder(BitWriter& out) : out_(out) {}

    void encode(uint32_t cum_lo, uint32_t cum_hi, uint32_t total) {
        uint64_t range = uint64_t(high_) - low_ + 1;
        high_ = low_ + uint32_t(range * cum_hi / total) - 1;
        low_ = low_ + uint32_t(range * cum_lo / total);
        for (;;) {
            if (high_ < HALF) {
                emit(0);
            } else if (low_ >= HALF) {
                emit(1);
                low_ -= HALF;
                high_ -= HALF;
            } else if (low_ >= QUARTER && high_ < THREEQ) {
                ++pending_;
                low_ -= QUARTER;
                high_ -= QUARTER;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
        }
    }

    void finish() {
        ++pending_;
        emit(low_ >= QUARTER ? 1 : 0);
    }

private:
    void emit(uint32_t bit) {
        out_.put(bit);
        while (pending_) {
            out_.put(bit ^ 1u);
            --pending_;
        }
    }

    BitWriter& out_;
    uint32_t low_ = 0;
    uint32_t high_ = 0xFFFFFFFFu;
    uint64_t pending_ = 0;
};

class ArithmeticDecoder {
    static constexpr uint32_t HALF = 0x80000000u;
    static constexpr uint32_t QUARTER = 0x40000000u;
    static constexpr uint32_t THREEQ = 0xC0000000u;

public:
    explicit ArithmeticDecoder(BitReader& in) : in_(in) {
        for (int i = 0; i < 32; ++i)
            value_ = (value_ << 1) | in_.get();
    }

    // cumulative target to search the frequency table with
    uint32_t target(uint32_t total) const {
        uint64_t range = uint64_t(high_) - low_ + 1;
        return uint32_t(((uint64_t(value_ - low_) + 1) * total - 1) / range);
    }

    void consume(uint32_t cum_lo, uint32_t cum_hi, uint32_t total) {
        uint64_t range = uint64_t(high_) - low_ + 1;
        high_ = low_ + uint32_t(range * cum_hi / total) - 1;
        low_ = low_ + uint32_t(range * cum_lo / total);
        for (;;) {
            if (high_ < HALF) {
                // nothing
            } else if (low_ >= HALF) {
                low_ -= HALF;
                high_ -= HALF;
                value_ -= HALF;
            } else if (low_ >= QUARTER && high_ < THREEQ) {
                low_ -= QUARTER;
                high_ -= QUARTER;
                value_ -= QUARTER;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
            value_ = (value_ << 1) | in_.get();
        }
    }

private:
    BitReader& in_;
    uint32_t low_ = 0;
    uint32_t high_ = 0xFFFFFFFFu;
    uint32_t value_ = 0;
};

} // namespace ctz

#endif
