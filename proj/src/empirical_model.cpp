#include "ctz/empirical_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace ctz {

uint32_t log2_squared(uint32_t n) {
    double l = std::log2(static_cast<double>(n));
    return static_cast<uint32_t>(std::ceil(l * l - 1e-9));
}

EmpiricalModel::EmpiricalModel(Sequence source, uint32_t block_len, uint32_t depth)
    : x_(std::move(source)), L_(block_len) {
    if (L_ < 1)
        throw ParamError("block length must be positive");
    M_ = static_cast<uint32_t>(x_.size() / L_);
    if (M_ < 2)
        throw InsufficientBlocks("need at least 2 blocks of length " + std::to_string(L_) +
                                 ", have " + std::to_string(x_.size()) + " symbols");
    D_ = std::min(depth, L_ - 1);
    hasher_ = SubstringHasher(x_.span());
    levels_.resize(D_ + 2);
}

void EmpiricalModel::check_len(uint32_t len) const {
    if (len < 1 || len > D_ + 1)
        throw DepthError("pattern length " + std::to_string(len) + " exceeds depth " +
                         std::to_string(D_));
}

const LevelTable& EmpiricalModel::level(uint32_t len) const {
    check_len(len);
    if (!levels_[len]) {
        uint32_t cov = coverage(len);
        auto t = std::make_unique<LevelTable>(x_.data(), len, cov);
        for (uint32_t s = 0; s < cov; ++s)
            t->add(hasher_.window(s, len), s, multiplicity(len, s));
        levels_[len] = std::move(t);
    }
    return *levels_[len];
}

const LevelTable& EmpiricalModel::full_window_table() const {
    if (!full_) {
        uint32_t cov = uint32_t(M_ - 1) * L_; // each start has exactly one (i,j) pair
        auto t = std::make_unique<LevelTable>(x_.data(), L_, cov);
        for (uint32_t s = 0; s < cov; ++s)
            t->add(hasher_.window(s, L_), s, 1);
        full_ = std::move(t);
    }
    return *full_;
}

uint64_t EmpiricalModel::pattern_count(SymbolSpan z) const {
    if (z.size() == uint32_t(L_))
        return full_window_table().count_of(z.data(), SubstringHasher::of(z.data(), z.size()));
    return level(static_cast<uint32_t>(z.size()))
        .count_of(z.data(), SubstringHasher::of(z.data(), z.size()));
}

uint64_t EmpiricalModel::phase_match_count(SymbolSpan z, uint32_t phase) const {
    uint32_t len = static_cast<uint32_t>(z.size());
    if (len != uint32_t(L_))
        check_len(len);
    if (phase < 1 || phase > L_)
        throw ParamError("phase must be in [1, block_len]");
    uint64_t hits = 0;
    for (uint32_t j = 0; j + 2 <= M_; ++j) {
        size_t s = (phase - 1) + size_t(j) * len;
        if (std::memcmp(x_.data() + s, z.data(), len) == 0)
            ++hits;
    }
    return hits;
}

Ratio EmpiricalModel::phase_probability(SymbolSpan z, uint32_t phase) const {
    return Ratio(phase_match_count(z, phase), M_ - 1);
}

Ratio EmpiricalModel::probability(SymbolSpan z) const {
    return Ratio(pattern_count(z), pair_total());
}

static double table_entropy_bits(const LevelTable& t, uint64_t total) {
    double h = 0.0;
    double lt = std::log2(static_cast<double>(total));
    for (const auto& e : t.entries()) {
        double c = static_cast<double>(e.count);
        h -= c * (std::log2(c) - lt);
    }
    return h / static_cast<double>(total);
}

double EmpiricalModel::block_entropy(uint32_t len) const {
    if (len == L_)
        return nblock_entropy();
    return table_entropy_bits(level(len), pair_total()) / len;
}

double EmpiricalModel::nblock_entropy() const {
    return table_entropy_bits(full_window_table(), uint64_t(M_ - 1) * L_) / L_;
}

double EmpiricalModel::order0_entropy() const {
    return block_entropy(1);
}

double EmpiricalModel::conditional_entropy(SymbolSpan ctx) const {
    uint32_t c = static_cast<uint32_t>(ctx.size());
    if (c == 0)
        return order0_entropy();
    if (c > D_)
        throw DepthError("context length " + std::to_string(c) + " exceeds depth " +
                         std::to_string(D_));
    uint64_t denom = level(c).count_of(ctx.data(), SubstringHasher::of(ctx.data(), c));
    if (denom == 0)
        throw UnseenContext("context has zero empirical probability");
    const LevelTable& next = level(c + 1);
    std::vector<Symbol> buf(ctx.begin(), ctx.end());
    buf.push_back(0);
    double h = 0.0;
    double ld = std::log2(static_cast<double>(denom));
    for (uint32_t a = 0; a < x_.alpha_size(); ++a) {
        buf[c] = static_cast<Symbol>(a);
        uint64_t cnt = next.count_of(buf.data(), SubstringHasher::of(buf.data(), c + 1));
        if (cnt == 0)
            continue;
        double p = static_cast<double>(cnt);
        h -= p * (std::log2(p) - ld);
    }
    return h / static_cast<double>(denom);
}

} // namespace ctz
