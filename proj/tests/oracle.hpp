#ifndef CTZ_TESTS_ORACLE_HPP
#define CTZ_TESTS_ORACLE_HPP

// Brute-force reference implementations used only by tests. Everything here
// follows the defining formulas directly, with no shared code or data
// structures with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ctz/sequence.hpp"

namespace oracle {

using Sym = ctz::Symbol;
using Vec = std::vector<Sym>;

// ---- sequence generators ------------------------------------------------

inline Vec random_uniform(uint16_t a, size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, a - 1);
    Vec v(n);
    for (auto& s : v)
        s = static_cast<Sym>(d(rng));
    return v;
}

// symmetric 2-state Markov chain: stays with probability p_stay
inline Vec markov2(double p_stay, size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(n);
    Sym cur = u(rng) < 0.5 ? 0 : 1;
    for (size_t i = 0; i < n; ++i) {
        v[i] = cur;
        if (u(rng) >= p_stay)
            cur = static_cast<Sym>(1 - cur);
    }
    return v;
}

inline Vec periodic(const Vec& pattern, size_t n) {
    Vec v(n);
    for (size_t i = 0; i < n; ++i)
        v[i] = pattern[i % pattern.size()];
    return v;
}

// binary de Bruijn word of order 3 (period 8), repeated
inline Vec de_bruijn8(size_t n) {
    return periodic({0, 0, 0, 1, 0, 1, 1, 1}, n);
}

// ---- phase-averaged window statistics ------------------------------------

// hits of z among windows at 0-based starts (phase-1)+j*len, j = 0..M-2
inline uint64_t phase_count(const Vec& x, uint32_t L, const Vec& z, uint32_t phase) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    uint32_t len = static_cast<uint32_t>(z.size());
    uint64_t hits = 0;
    for (uint32_t j = 0; j + 2 <= M; ++j) {
        size_t s = (phase - 1) + size_t(j) * len;
        if (std::equal(z.begin(), z.end(), x.begin() + s))
            ++hits;
    }
    return hits;
}

inline uint64_t pair_count(const Vec& x, uint32_t L, const Vec& z) {
    uint64_t total = 0;
    for (uint32_t i = 1; i <= L; ++i)
        total += phase_count(x, L, z, i);
    return total;
}

inline double probability(const Vec& x, uint32_t L, const Vec& z) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    return double(pair_count(x, L, z)) / (double(L) * (M - 1));
}

// all distinct len-patterns with nonzero pair count
inline std::map<Vec, uint64_t> distribution(const Vec& x, uint32_t L, uint32_t len) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    std::map<Vec, uint64_t> out;
    for (uint32_t i = 1; i <= L; ++i)
        for (uint32_t j = 0; j + 2 <= M; ++j) {
            size_t s = (i - 1) + size_t(j) * len;
            out[Vec(x.begin() + s, x.begin() + s + len)] += 1;
        }
    return out;
}

inline double block_entropy(const Vec& x, uint32_t L, uint32_t len) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    double total = double(L) * (M - 1);
    double h = 0;
    for (const auto& [z, c] : distribution(x, L, len)) {
        double p = double(c) / total;
        h -= p * std::log2(p);
    }
    return h / len;
}

inline double conditional_entropy(const Vec& x, uint32_t L, const Vec& ctx, uint16_t a) {
    if (ctx.empty())
        return block_entropy(x, L, 1);
    uint64_t denom = pair_count(x, L, ctx);
    double h = 0;
    for (uint16_t s = 0; s < a; ++s) {
        Vec ext = ctx;
        ext.push_back(static_cast<Sym>(s));
        uint64_t c = pair_count(x, L, ext);
        if (c == 0)
            continue;
        double p = double(c) / double(denom);
        h -= p * std::log2(p);
    }
    return h;
}

// sliding-window frequency over starts 1..(M-1)N+1 (1-based), the standard
// empirical probability
inline double sliding_frequency(const Vec& x, uint32_t L, const Vec& z) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    size_t starts = size_t(M - 1) * L + 1;
    uint64_t hits = 0;
    for (size_t s = 0; s < starts; ++s)
        if (s + z.size() <= x.size() && std::equal(z.begin(), z.end(), x.begin() + s))
            ++hits;
    return double(hits) / double(starts);
}

// ---- candidate tree and context selection --------------------------------

inline bool floor_pass(uint64_t count, uint64_t pairs, uint64_t k_num, uint64_t k_den) {
    return (unsigned __int128)count * k_num >= (unsigned __int128)pairs * k_den;
}

// log2 of integers through a table, mirroring the library's float path so
// that exact entropy ties reproduce bit-for-bit
inline double olog2(uint64_t v) {
    static std::vector<double> table = [] {
        std::vector<double> t(1u << 16);
        t[0] = 0;
        for (uint32_t i = 1; i < t.size(); ++i)
            t[i] = std::log2(double(i));
        return t;
    }();
    return v < table.size() ? table[v] : std::log2(double(v));
}

// successor-sum normalized conditional entropy of a context; +inf when the
// context has no observed successor mass
inline double node_entropy(const Vec& x, uint32_t L, const Vec& ctx, uint16_t a) {
    uint64_t s = 0;
    std::vector<uint64_t> c(a, 0);
    for (uint16_t sym = 0; sym < a; ++sym) {
        Vec ext = ctx;
        ext.push_back(static_cast<Sym>(sym));
        c[sym] = pair_count(x, L, ext);
        s += c[sym];
    }
    if (s == 0)
        return std::numeric_limits<double>::infinity();
    double acc = 0;
    for (uint16_t sym = 0; sym < a; ++sym)
        if (c[sym])
            acc += double(c[sym]) * olog2(c[sym]);
    return olog2(s) - acc / double(s);
}

// all in-tree contexts (length 1..depth) by exhaustive enumeration
inline std::map<Vec, uint64_t> tree_contexts(const Vec& x, uint32_t L, uint32_t depth,
                                             uint64_t k_num, uint64_t k_den) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    uint64_t pairs = uint64_t(L) * (M - 1);
    std::map<Vec, uint64_t> out;
    for (uint32_t len = 1; len <= depth; ++len)
        for (auto& [z, c] : distribution(x, L, len))
            if (floor_pass(c, pairs, k_num, k_den))
                out[z] = c;
    return out;
}

struct SelectResult {
    double h_u;
    double root_entropy;
    std::map<Vec, double> chosen; // context -> its conditional entropy
    std::map<Vec, Vec> argmin;    // history -> chosen context
};

// context selection: per depth-`hist` history, minimize the successor-sum
// conditional entropy over in-tree suffixes (root included), shortest wins
// ties; average weighted by the history pair counts.
inline SelectResult select(const Vec& x, uint32_t L, uint32_t depth, uint64_t k_num,
                           uint64_t k_den, uint16_t a) {
    SelectResult r;
    auto tree = tree_contexts(x, L, depth, k_num, k_den);
    r.root_entropy = node_entropy(x, L, {}, a);
    auto hist = distribution(x, L, depth);
    double acc = 0, wsum = 0;
    for (auto& [w, c] : hist) {
        double best = r.root_entropy;
        Vec best_ctx;
        for (uint32_t j = 1; j <= w.size(); ++j) {
            Vec sfx(w.end() - j, w.end());
            if (!tree.count(sfx))
                continue;
            double h = node_entropy(x, L, sfx, a);
            if (h < best) {
                best = h;
                best_ctx = sfx;
            }
        }
        r.argmin[w] = best_ctx;
        r.chosen[best_ctx] = best;
        acc += double(c) * best;
        wsum += double(c);
    }
    r.h_u = wsum ? acc / wsum : r.root_entropy;
    return r;
}

// ---- Huffman code over the observed N-blocks -----------------------------

// Canonical Huffman lengths for the full-window distribution plus a unit
// escape atom; unseen blocks cost escape + raw. Kraft holds by construction
// and is re-verified exactly in 128-bit arithmetic.
struct HuffmanOracle {
    std::map<Vec, uint64_t> lens;
    uint64_t escape_len = 0;
    uint32_t n = 0;
    uint16_t a = 2;

    static HuffmanOracle build(const Vec& x, uint32_t N, uint16_t a) {
        HuffmanOracle h;
        h.n = N;
        h.a = a;
        uint32_t M = static_cast<uint32_t>(x.size() / N);
        std::map<Vec, uint64_t> counts;
        for (size_t s = 0; s < size_t(M - 1) * N; ++s)
            counts[Vec(x.begin() + s, x.begin() + s + N)] += 1;

        // atoms: observed blocks + escape (weight 1)
        struct Node {
            uint64_t w;
            int left, right;
            int atom; // -1 internal, -2 escape
        };
        std::vector<Node> nodes;
        std::vector<const Vec*> atom_keys;
        for (auto& [z, c] : counts) {
            nodes.push_back({c, -1, -1, int(atom_keys.size())});
            atom_keys.push_back(&z);
        }
        nodes.push_back({1, -1, -1, -2});
        // stable two-queue Huffman via repeated min scan (test scale)
        std::vector<int> alive(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i)
            alive[i] = int(i);
        while (alive.size() > 1) {
            std::sort(alive.begin(), alive.end(),
                      [&](int p, int q) { return nodes[p].w < nodes[q].w; });
            int p = alive[0], q = alive[1];
            nodes.push_back({nodes[p].w + nodes[q].w, p, q, -1});
            alive.erase(alive.begin(), alive.begin() + 2);
            alive.push_back(int(nodes.size() - 1));
        }
        // depth assignment
        std::vector<std::pair<int, uint64_t>> stack{{alive[0], 0}};
        while (!stack.empty()) {
            auto [id, d] = stack.back();
            stack.pop_back();
            const Node& nd = nodes[id];
            if (nd.atom == -2)
                h.escape_len = std::max<uint64_t>(1, d);
            else if (nd.atom >= 0)
                h.lens[*atom_keys[nd.atom]] = std::max<uint64_t>(1, d);
            else {
                stack.push_back({nd.left, d + 1});
                stack.push_back({nd.right, d + 1});
            }
        }
        return h;
    }

    uint32_t sym_bits() const {
        uint32_t b = 0;
        while ((1u << b) < a)
            ++b;
        return b;
    }

    uint64_t length_bits(const Vec& block) const {
        auto it = lens.find(block);
        if (it != lens.end())
            return it->second;
        return escape_len + uint64_t(n) * sym_bits();
    }

    // sum of 2^-L over the whole domain A^n, exact
    bool kraft_ok() const {
        uint64_t maxl = escape_len + uint64_t(n) * sym_bits();
        for (auto& [z, l] : lens)
            maxl = std::max(maxl, l);
        if (maxl > 120)
            return true; // sums are then far below 1
        unsigned __int128 scale = (unsigned __int128)1 << maxl;
        unsigned __int128 sum = 0;
        double domain = std::pow(double(a), double(n));
        for (auto& [z, l] : lens)
            sum += scale >> l;
        // unseen blocks: (A^n - observed) * 2^-(escape + raw)
        double unseen = domain - double(lens.size());
        long double add = (long double)unseen *
                          (long double)(scale >> std::min<uint64_t>(maxl, escape_len +
                                                                              uint64_t(n) *
                                                                                  sym_bits()));
        return (long double)sum + add <= (long double)scale * (1 + 1e-12L);
    }
};

// the depth-selection rule, straight from the definition
inline int32_t k1(const Vec& x, uint32_t L, uint32_t t, const Vec& z, uint64_t k) {
    uint32_t M = static_cast<uint32_t>(x.size() / L);
    uint64_t pairs = uint64_t(L) * (M - 1);
    for (uint32_t j = 1; j <= z.size(); ++j) {
        Vec tail(z.end() - j, z.end());
        uint64_t c = pair_count(x, L, tail);
        if ((unsigned __int128)c * k <= (unsigned __int128)pairs * 1)
            return int32_t(std::min(j - 1, t));
    }
    return -1;
}

} // namespace oracle

#endif
