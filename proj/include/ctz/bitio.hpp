#ifndef CTZ_BITIO_HPP
#define CTZ_BITIO_HPP

#include <cstdint>
#include <vector>

namespace ctz {

// MSB-first bit packing; multi-bit values big-endian.
class BitWriter {
public:
    void put(uint32_t bit) {
        if (fill_ == 0) {
            bytes_.push_back(0);
            fill_ = 8;
        }
        --fill_;
        if (bit)
            bytes_.back() |= uint8_t(1u << fill_);
        ++bits_;
    }
    void put_bits(uint64_t value, uint32_t nbits) {
        for (uint32_t i = nbits; i-- > 0;)
            put(uint32_t(value >> i) & 1u);
    }
    uint64_t bit_count() const { return bits_; }
    const std::vector<uint8_t>& bytes() const { return bytes_; }
    std::vector<uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<uint8_t> bytes_;
    uint32_t fill_ = 0;
    uint64_t bits_ = 0;
};

// Reads MSB-first; past the declared end it yields zero bits (the
// arithmetic decoder's lookahead needs them) and counts the overrun.
class BitReader {
public:
    BitReader(const uint8_t* data, uint64_t bit_len) : data_(data), len_(bit_len) {}

    uint32_t get() {
        if (pos_ >= len_) {
            ++pos_;
            return 0;
        }
        uint32_t b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return b;
    }
    uint64_t get_bits(uint32_t nbits) {
        uint64_t v = 0;
        for (uint32_t i = 0; i < nbits; ++i)
            v = (v << 1) | get();
        return v;
    }
    uint64_t position() const { return pos_; }
    uint64_t bit_length() const { return len_; }
    bool overrun() const { return pos_ > len_; }

private:
    const uint8_t* data_;
    uint64_t len_;
    uint64_t pos_ = 0;
};

inline void put_u16_be(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(uint8_t(x >> 8));
    v.push_back(uint8_t(x));
}
inline void put_u32_be(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(uint8_t(x >> 24));
    v.push_back(uint8_t(x >> 16));
    v.push_back(uint8_t(x >> 8));
    v.push_back(uint8_t(x));
}
inline void put_u64_be(std::vector<uint8_t>& v, uint64_t x) {
    put_u32_be(v, uint32_t(x >> 32));
    put_u32_be(v, uint32_t(x));
}

} // namespace ctz

#endif
