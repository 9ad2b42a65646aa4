#ifndef CTZ_SEQUENCE_HPP
#define CTZ_SEQUENCE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctz/errors.hpp"

namespace ctz {

using Symbol = uint8_t;
using SymbolSpan = std::span<const Symbol>;

struct Alphabet {
    uint16_t size = 2;

    explicit Alphabet(uint16_t a = 2) : size(a) {
        if (a < 2 || a > 256)
            throw ParamError("alphabet size must be in [2,256], got " + std::to_string(a));
    }
    uint32_t bits_per_symbol() const {
        uint32_t b = 0;
        while ((1u << b) < size) ++b;
        return b; // ceil(log2 A)
    }
};

// An individual sequence over a finite alphabet.
class Sequence {
public:
    Sequence(Alphabet a, std::vector<Symbol> syms) : alpha_(a), symbols_(std::move(syms)) {
        for (Symbol s : symbols_)
            if (s >= alpha_.size)
                throw ParamError("symbol value " + std::to_string(int(s)) +
                                 " out of range for alphabet " + std::to_string(alpha_.size));
    }
    static Sequence from_string(const std::string& s, uint16_t a = 0) {
        // convenience for tests: 'a'..'z' map to 0..25
        std::vector<Symbol> v;
        v.reserve(s.size());
        Symbol mx = 0;
        for (char c : s) {
            Symbol x = static_cast<Symbol>(c - 'a');
            v.push_back(x);
            if (x > mx) mx = x;
        }
        uint16_t need = static_cast<uint16_t>(mx + 1);
        return Sequence(Alphabet(a ? a : (need < 2 ? 2 : need)), std::move(v));
    }

    const Alphabet& alphabet() const { return alpha_; }
    uint16_t alpha_size() const { return alpha_.size; }
    size_t size() const { return symbols_.size(); }
    Symbol operator[](size_t i) const { return symbols_[i]; }
    const Symbol* data() const { return symbols_.data(); }
    SymbolSpan span() const { return {symbols_.data(), symbols_.size()}; }
    SymbolSpan window(size_t pos, size_t len) const { return {symbols_.data() + pos, len}; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

private:
    Alphabet alpha_;
    std::vector<Symbol> symbols_;
};

// One symbol per byte; values must be < A (unchecked when A = 256).
Sequence read_symbol_file(const std::string& path, uint16_t alphabet_size);
void write_symbol_file(const std::string& path, SymbolSpan symbols);

std::vector<uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes);

} // namespace ctz

#endif
