#ifndef CTZ_LOGTABLE_HPP
#define CTZ_LOGTABLE_HPP

#include <cmath>
#include <cstdint>

namespace ctz {

// log2 of small integers from one shared table so every entropy value is
// computed through the identical float path (ties must reproduce exactly)
inline double log2_int(uint64_t v) {
    constexpr uint32_t table_size = 1u << 16;
    static const double* table = [] {
        static double t[table_size];
        t[0] = 0.0;
        for (uint32_t i = 1; i < table_size; ++i)
            t[i] = std::log2(double(i));
        return t;
    }();
    return v < table_size ? table[v] : std::log2(double(v));
}

// successor-sum normalized entropy of integer counts: log2(S) - sum c log2(c) / S
template <typename CountT>
inline double counts_entropy(const CountT* counts, uint32_t n, uint64_t total) {
    double acc = 0;
    for (uint32_t i = 0; i < n; ++i)
        if (counts[i])
            acc += double(counts[i]) * log2_int(counts[i]);
    return log2_int(total) - acc / double(total);
}

} // namespace ctz

#endif
