#ifndef CTZ_RATIONAL_HPP
#define CTZ_RATIONAL_HPP

#include <cstdint>
#include <numeric>

namespace ctz {

// Exact nonnegative rational. Counts and normalizers stay well inside
// 64 bits; comparisons cross-multiply in 128 bits so no overflow.
struct Ratio {
    uint64_t num = 0;
    uint64_t den = 1;

    Ratio() = default;
    Ratio(uint64_t n, uint64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (num == 0) { den = 1; return; }
        uint64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return static_cast<unsigned __int128>(a.num) * b.den <
               static_cast<unsigned __int128>(b.num) * a.den;
    }
    friend bool operator<=(const Ratio& a, const Ratio& b) {
        return static_cast<unsigned __int128>(a.num) * b.den <=
               static_cast<unsigned __int128>(b.num) * a.den;
    }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend bool operator>=(const Ratio& a, const Ratio& b) { return b <= a; }
};

// count/total >= den/num, i.e. probability count/total >= 1/(num/den)
inline bool at_least_inverse(uint64_t count, uint64_t total, uint64_t k_num, uint64_t k_den) {
    return static_cast<unsigned __int128>(count) * k_num >=
           static_cast<unsigned __int128>(total) * k_den;
}

// count/total <= den/num
inline bool at_most_inverse(uint64_t count, uint64_t total, uint64_t k_num, uint64_t k_den) {
    return static_cast<unsigned __int128>(count) * k_num <=
           static_cast<unsigned __int128>(total) * k_den;
}

} // namespace ctz

#endif
