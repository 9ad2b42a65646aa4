#ifndef CTZ_EMPIRICAL_MODEL_HPP
#define CTZ_EMPIRICAL_MODEL_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "ctz/rational.hpp"
#include "ctz/sequence.hpp"

namespace ctz {

// Rolling polynomial hash over the source; window hashes in O(1).
class SubstringHasher {
public:
    static constexpr uint64_t MULT = 0x9E3779B97F4A7C55ull;

    SubstringHasher() = default;
    explicit SubstringHasher(SymbolSpan s) {
        prefix_.resize(s.size() + 1);
        pow_.resize(s.size() + 1);
        prefix_[0] = 0;
        pow_[0] = 1;
        for (size_t i = 0; i < s.size(); ++i) {
            prefix_[i + 1] = prefix_[i] * MULT + s[i] + 1;
            pow_[i + 1] = pow_[i] * MULT;
        }
    }

    uint64_t window(size_t pos, size_t len) const {
        return prefix_[pos + len] - prefix_[pos] * pow_[len];
    }

    static uint64_t of(const Symbol* p, size_t len) {
        uint64_t h = 0;
        for (size_t i = 0; i < len; ++i)
            h = h * MULT + p[i] + 1;
        return h;
    }

private:
    std::vector<uint64_t> prefix_;
    std::vector<uint64_t> pow_;
};

// Open-addressed content map for fixed-length windows of one source.
// Keys are verified by content compare, so counts are exact.
class LevelTable {
public:
    struct Entry {
        uint64_t hash;
        uint64_t count;
        uint32_t pos; // witness start in the source
        uint32_t occ; // distinct covered start positions
    };

    LevelTable(const Symbol* source, uint32_t len, size_t expected)
        : source_(source), len_(len) {
        size_t cap = 16;
        while (cap < expected * 2)
            cap <<= 1;
        mask_ = cap - 1;
        slots_.assign(cap, 0);
        entries_.reserve(expected);
    }

    uint32_t len() const { return len_; }
    const std::vector<Entry>& entries() const { return entries_; }

    // add `mult` to the window starting at `pos`; returns entry index
    uint32_t add(uint64_t hash, uint32_t pos, uint64_t mult) {
        size_t i = slot_of(hash, source_ + pos);
        if (slots_[i] == 0) {
            entries_.push_back({hash, mult, pos, 1});
            slots_[i] = static_cast<uint32_t>(entries_.size());
            return static_cast<uint32_t>(entries_.size() - 1);
        }
        Entry& e = entries_[slots_[i] - 1];
        e.count += mult;
        e.occ += 1;
        return slots_[i] - 1;
    }

    // count of a window given by content (may live outside the source)
    uint64_t count_of(const Symbol* p, uint64_t hash) const {
        size_t i = slot_of(hash, p);
        return slots_[i] ? entries_[slots_[i] - 1].count : 0;
    }
    int64_t find(const Symbol* p, uint64_t hash) const {
        size_t i = slot_of(hash, p);
        return slots_[i] ? static_cast<int64_t>(slots_[i] - 1) : -1;
    }

private:
    size_t slot_of(uint64_t hash, const Symbol* content) const {
        size_t i = (hash ^ (hash >> 29)) & mask_;
        while (slots_[i]) {
            const Entry& e = entries_[slots_[i] - 1];
            if (e.hash == hash && std::equal(content, content + len_, source_ + e.pos))
                return i;
            i = (i + 1) & mask_;
        }
        return i;
    }

    const Symbol* source_;
    uint32_t len_;
    size_t mask_;
    std::vector<uint32_t> slots_; // entry index + 1, 0 = empty
    std::vector<Entry> entries_;
};

// Phase-averaged empirical statistics of X_1^{LM}: counts of l-windows at
// starts i+jl (phases i = 1..L, j = 0..M-2), each start weighted by its
// number of representations. Probabilities are exact rationals over
// L(M-1); entropies are in bits.
class EmpiricalModel {
public:
    // block_len: the phase structure's block length (N overall, t within a block)
    // depth: deepest context the model serves; tables go to depth+1
    EmpiricalModel(Sequence source, uint32_t block_len, uint32_t depth);

    uint32_t block_len() const { return L_; }
    uint32_t blocks() const { return M_; }
    uint32_t depth() const { return D_; }
    uint64_t pair_total() const { return uint64_t(L_) * (M_ - 1); }
    const Sequence& source() const { return x_; }
    const SubstringHasher& hasher() const { return hasher_; }

    // number of valid 0-based window starts for length len
    uint32_t coverage(uint32_t len) const {
        return L_ + uint32_t(M_ - 2) * len;
    }
    // number of (phase, j) pairs representing start s
    uint64_t multiplicity(uint32_t len, uint32_t s) const {
        uint64_t hi = std::min<uint64_t>(M_ - 2, s / len);
        uint64_t lo = s + 1 > L_ ? (s + 1 - L_ + len - 1) / len : 0;
        return hi >= lo ? hi - lo + 1 : 0;
    }

    // exact pair count of a pattern (sum of multiplicities over matches)
    uint64_t pattern_count(SymbolSpan z) const;
    // matches of z among the M-1 windows of one phase (1-based, 1 <= phase <= L)
    uint64_t phase_match_count(SymbolSpan z, uint32_t phase) const;

    Ratio phase_probability(SymbolSpan z, uint32_t phase) const;
    Ratio probability(SymbolSpan z) const;

    double block_entropy(uint32_t len) const;      // H over len-windows, per letter
    double nblock_entropy() const;                 // len = block_len via full enumeration
    double conditional_entropy(SymbolSpan ctx) const;
    double order0_entropy() const;                 // null context

    const LevelTable& level(uint32_t len) const;   // lazy, cached
    const LevelTable& full_window_table() const;   // block_len-windows, starts 0..(M-1)L-1

private:
    void check_len(uint32_t len) const;

    Sequence x_;
    SubstringHasher hasher_;
    uint32_t L_;
    uint32_t M_;
    uint32_t D_;
    mutable std::vector<std::unique_ptr<LevelTable>> levels_;
    mutable std::unique_ptr<LevelTable> full_;
};

// ceil((log2 N)^2), the context horizon the algorithms default to
uint32_t log2_squared(uint32_t n);

} // namespace ctz

#endif
