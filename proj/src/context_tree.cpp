#include "ctz/context_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ctz/logtable.hpp"

namespace ctz {

namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

inline size_t slot_index(uint64_t h, size_t mask) {
    return (h ^ (h >> 29)) & mask;
}

struct BestRef {
    double h;
    uint32_t lev;
    uint32_t pos;
};

} // namespace

void TreeWorkspace::Level::prepare(size_t cov, uint16_t a) {
    size_t cap = 16;
    while (cap < cov * 2)
        cap <<= 1;
    slots.assign(cap, 0);
    mask = cap - 1;
    n = 0;
    if (hash.size() < cov) {
        hash.resize(cov);
        pos.resize(cov);
        count.resize(cov);
        chain_lev.resize(cov);
        chain_id.resize(cov);
        best_h.resize(cov);
        best_lev.resize(cov);
        best_pos.resize(cov);
        ids.resize(cov);
    }
    if (succ.size() < cov * a)
        succ.resize(cov * a);
    std::fill(succ.begin(), succ.begin() + cov * a, 0u);
}

int64_t TreeWorkspace::Level::find(const Symbol* src, const Symbol* content, uint64_t h,
                                   uint32_t len) const {
    size_t i = slot_index(h, mask);
    while (slots[i]) {
        uint32_t e = slots[i] - 1;
        if (hash[e] == h && std::memcmp(src + pos[e], content, len) == 0)
            return e;
        i = (i + 1) & mask;
    }
    return -1;
}

TreeAnalysis analyze_contexts(const EmpiricalModel& model, const TreeOptions& opt,
                              TreeWorkspace* ws) {
    const Sequence& x = model.source();
    const Symbol* src = x.data();
    const SubstringHasher& hasher = model.hasher();
    const uint16_t A = x.alpha_size();
    const uint64_t pairs = model.pair_total();
    if (pairs > 0xFFFFFFFFull)
        throw ParamError("analysis limited to 2^32 phase pairs");
    const uint32_t D = std::min(opt.max_depth, model.depth());

    TreeWorkspace local;
    if (!ws)
        ws = &local;

    TreeAnalysis out;
    out.depth_cap = D;

    // root: successor counts are the level-1 pattern counts
    std::vector<uint64_t> root_succ(A, 0);

    if (ws->levels.size() < size_t(D) + 2)
        ws->levels.resize(size_t(D) + 2);

    // membership restriction lookup (tiny sets)
    auto allowed_has = [&](const Symbol* p, uint32_t len) {
        for (const auto& c : *opt.allowed)
            if (c.size() == len && std::memcmp(c.data(), p, len) == 0)
                return true;
        return false;
    };

    const uint32_t L = model.block_len();
    const uint32_t M = model.blocks();

    // scan level l: count all length-l windows; accumulate successor counts
    // of the level-(l-1) entries through the shared start position.
    // multiplicity(l, s) is maintained with running counters; divisions in
    // this loop would dominate the hot path.
    auto scan = [&](uint32_t l) {
        auto& lv = ws->levels[l];
        uint32_t cov = model.coverage(l);
        lv.prepare(cov, A);
        uint32_t hi = 0, r_hi = 0;      // floor(s / l)
        uint32_t lo_u = 0, r_lo = 0;    // floor((s - L) / l) for s >= L
        auto mult_of = [&](uint32_t s) {
            uint64_t hi_c = std::min<uint64_t>(M - 2, hi);
            uint64_t lo_c = s >= L ? uint64_t(lo_u) + 1 : 0;
            uint64_t mult = hi_c >= lo_c ? hi_c - lo_c + 1 : 0;
            if (++r_hi == l) {
                r_hi = 0;
                ++hi;
            }
            if (s >= L && ++r_lo == l) {
                r_lo = 0;
                ++lo_u;
            }
            return mult;
        };
        // inline probe-or-insert; entries live in preallocated parallel arrays
        uint32_t* slots = lv.slots.data();
        const size_t mask = lv.mask;
        auto upsert = [&](uint64_t h, uint32_t s, uint32_t mult, bool& fresh) {
            size_t i = slot_index(h, mask);
            for (;;) {
                uint32_t v = slots[i];
                if (!v) {
                    uint32_t e = uint32_t(lv.n++);
                    slots[i] = e + 1;
                    lv.hash[e] = h;
                    lv.pos[e] = s;
                    lv.count[e] = mult;
                    fresh = true;
                    return e;
                }
                uint32_t e = v - 1;
                if (lv.hash[e] == h && std::memcmp(src + lv.pos[e], src + s, l) == 0) {
                    lv.count[e] += mult;
                    fresh = false;
                    return e;
                }
                i = (i + 1) & mask;
            }
        };

        if (l == 1) {
            for (uint32_t s = 0; s < cov; ++s) {
                uint32_t mult = uint32_t(mult_of(s));
                bool fresh;
                uint32_t e = upsert(hasher.window(s, 1), s, mult, fresh);
                lv.ids[s] = e;
                root_succ[src[s]] += mult;
                if (fresh)
                    lv.chain_lev[e] = 0;
            }
            return;
        }
        auto& prev = ws->levels[l - 1];
        uint32_t prev_cov = model.coverage(l - 1);
        uint32_t* prev_succ = prev.succ.data();
        const uint32_t* prev_ids = prev.ids.data();
        for (uint32_t s = 0; s < cov; ++s) {
            uint32_t mult = uint32_t(mult_of(s));
            bool fresh;
            uint32_t e = upsert(hasher.window(s, l), s, mult, fresh);
            lv.ids[s] = e;
            // prefix parent (same start, one shorter) accumulates the successor
            if (s < prev_cov) {
                prev_succ[size_t(prev_ids[s]) * A + src[s + l - 1]] += mult;
            } else {
                int64_t pe = prev.find(src, src + s, hasher.window(s, l - 1), l - 1);
                if (pe >= 0)
                    prev_succ[size_t(pe) * A + src[s + l - 1]] += mult;
            }
            // suffix chain (for the running minimum): longest proper suffix
            // that has an entry at its own level
            if (fresh) {
                uint32_t k = l - 1;
                uint32_t q = s + 1;
                uint32_t cl = 0, ci = 0;
                while (k >= 1) {
                    auto& lk = ws->levels[k];
                    int64_t id;
                    if (q < lk.ids.size() && q < model.coverage(k))
                        id = lk.ids[q];
                    else
                        id = lk.find(src, src + q, hasher.window(q, k), k);
                    if (id >= 0) {
                        cl = k;
                        ci = static_cast<uint32_t>(id);
                        break;
                    }
                    --k;
                    ++q;
                }
                lv.chain_lev[e] = cl;
                lv.chain_id[e] = ci;
            }
        }
    };

    scan(1);

    // root entropy (order-0, successor-sum normalized)
    {
        uint64_t S = 0;
        for (uint16_t a = 0; a < A; ++a)
            S += root_succ[a];
        out.root_entropy = S ? counts_entropy(root_succ.data(), A, S) : 0.0;
    }
    BestRef root_best{out.root_entropy, 0, 0};

    if (opt.keep_nodes) {
        TreeNodeView rv;
        rv.count = pairs;
        rv.succ = root_succ;
        rv.cond_entropy = out.root_entropy;
        rv.in_tree = true;
        out.nodes.push_back(std::move(rv));
    }

    if (D == 0) {
        out.history_depth = 0;
        out.h_u = out.root_entropy;
        out.chosen.push_back({{}, out.root_entropy});
        return out;
    }

    uint32_t zero_streak = 0;
    uint32_t hist = 0;

    for (uint32_t l = 1;; ++l) {
        scan(l + 1);
        // finalize level l: entropies, membership, running minima
        auto& lv = ws->levels[l];
        uint64_t level_in_tree = 0;
        for (uint32_t e = 0; e < lv.n; ++e) {
            bool in_tree = at_least_inverse(lv.count[e], pairs, opt.k_num, opt.k_den);
            if (in_tree && opt.allowed)
                in_tree = allowed_has(src + lv.pos[e], l);
            BestRef b = lv.chain_lev[e] == 0
                            ? root_best
                            : BestRef{ws->levels[lv.chain_lev[e]].best_h[lv.chain_id[e]],
                                      ws->levels[lv.chain_lev[e]].best_lev[lv.chain_id[e]],
                                      ws->levels[lv.chain_lev[e]].best_pos[lv.chain_id[e]]};
            if (in_tree) {
                // only tree members need their conditional entropy
                const uint32_t* sc = lv.succ.data() + size_t(e) * A;
                uint64_t S = 0;
                for (uint16_t a = 0; a < A; ++a)
                    S += sc[a];
                double h_e = S ? counts_entropy(sc, A, S) : INF;
                if (S > 0 && h_e < b.h)
                    b = BestRef{h_e, l, lv.pos[e]};
                ++level_in_tree;
                if (opt.keep_nodes) {
                    TreeNodeView v;
                    v.context.assign(src + lv.pos[e], src + lv.pos[e] + l);
                    v.count = lv.count[e];
                    v.succ.assign(sc, sc + A);
                    v.cond_entropy = h_e;
                    v.in_tree = true;
                    out.nodes.push_back(std::move(v));
                }
            }
            lv.best_h[e] = b.h;
            lv.best_lev[e] = b.lev;
            lv.best_pos[e] = b.pos;
        }
        out.in_tree_nodes += level_in_tree;
        if (level_in_tree) {
            out.deepest_in_tree = l;
            zero_streak = 0;
        } else {
            ++zero_streak;
        }
        if (l == D || (opt.early_stop && zero_streak >= 2 && l >= 2)) {
            hist = l;
            break;
        }
    }

    // Average of the per-history minima, weighted by the history counts.
    out.history_depth = hist;
    auto& hl = ws->levels[hist];
    double acc = 0;
    uint64_t wsum = 0;
    for (uint32_t e = 0; e < hl.n; ++e) {
        acc += double(hl.count[e]) * hl.best_h[e];
        wsum += hl.count[e];
    }
    out.h_u = wsum ? acc / double(wsum) : out.root_entropy;

    // chosen contexts = distinct per-history minimizers
    std::vector<std::pair<uint64_t, double>> keys; // (lev<<32|pos, h)
    keys.reserve(hl.n);
    for (uint32_t e = 0; e < hl.n; ++e)
        keys.push_back({(uint64_t(hl.best_lev[e]) << 32) | hl.best_pos[e], hl.best_h[e]});
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end(),
                           [](auto& a, auto& b) { return a.first == b.first; }),
               keys.end());
    for (auto& [key, h] : keys) {
        uint32_t lev = uint32_t(key >> 32), p = uint32_t(key);
        ChosenContext c;
        c.context.assign(src + p, src + p + lev);
        c.cond_entropy = h;
        out.chosen.push_back(std::move(c));
    }
    std::sort(out.chosen.begin(), out.chosen.end(), [](const auto& a, const auto& b) {
        if (a.context.size() != b.context.size())
            return a.context.size() < b.context.size();
        return a.context < b.context;
    });
    return out;
}

ContextTree ContextTree::build(const EmpiricalModel& model, uint64_t k_num, uint64_t k_den,
                               uint32_t max_depth) {
    TreeOptions opt;
    opt.k_num = k_num;
    opt.k_den = k_den;
    opt.max_depth = max_depth;
    opt.keep_nodes = true;
    opt.early_stop = false;
    ContextTree t;
    t.a_ = analyze_contexts(model, opt);
    return t;
}

ContextTree ContextTree::build(const Sequence& x, uint64_t floor_inverse_k, uint32_t t) {
    if (t < 1 || x.size() < t)
        throw ParamError("sequence shorter than the context depth t");
    EmpiricalModel m(x, t, t >= 1 ? t - 1 : 0);
    return build(m, floor_inverse_k, 1, t - 1);
}

const TreeNodeView* ContextTree::find(SymbolSpan ctx) const {
    for (const auto& n : a_.nodes)
        if (n.context.size() == ctx.size() &&
            std::equal(ctx.begin(), ctx.end(), n.context.begin()))
            return &n;
    return nullptr;
}

PrunedTree select_optimal_contexts(const ContextTree& tree) {
    PrunedTree p;
    p.contexts = tree.analysis().chosen;
    p.h_u = tree.analysis().h_u;
    p.max_depth = 0;
    for (const auto& c : p.contexts)
        p.max_depth = std::max<uint32_t>(p.max_depth, uint32_t(c.context.size()));
    return p;
}

int32_t k1_depth(const EmpiricalModel& model, SymbolSpan z, uint64_t k) {
    uint32_t t = model.depth();
    for (uint32_t j = 1; j <= z.size(); ++j) {
        SymbolSpan tail(z.data() + z.size() - j, j);
        uint64_t cnt;
        if (j <= model.depth() + 1) {
            cnt = model.pattern_count(tail);
        } else {
            // beyond the cached tables: count directly
            cnt = 0;
            uint32_t cov = model.coverage(j);
            for (uint32_t s = 0; s < cov; ++s)
                if (std::memcmp(model.source().data() + s, tail.data(), j) == 0)
                    cnt += model.multiplicity(j, s);
        }
        if (at_most_inverse(cnt, model.pair_total(), k, 1))
            return static_cast<int32_t>(std::min(j - 1, t));
    }
    return -1;
}

double h_u_value(const Sequence& x, uint32_t n, uint64_t k_num, uint64_t k_den, uint32_t m) {
    if (x.size() < size_t(n) * m)
        throw ParamError("sequence shorter than N*M");
    Sequence prefix(x.alphabet(),
                    std::vector<Symbol>(x.symbols().begin(), x.symbols().begin() + size_t(n) * m));
    uint32_t depth = std::min(log2_squared(n), n - 1);
    EmpiricalModel model(std::move(prefix), n, depth);
    TreeOptions opt;
    opt.k_num = k_num;
    opt.k_den = k_den;
    opt.max_depth = depth;
    opt.early_stop = false; // fixed history depth keeps H_u monotone in K
    return analyze_contexts(model, opt).h_u;
}

double h_u_value(const Sequence& x, uint32_t n, uint64_t k, uint32_t m) {
    return h_u_value(x, n, k, 1, m);
}

ContextResolver::ContextResolver(uint16_t alphabet,
                                 const std::vector<std::vector<Symbol>>& contexts)
    : a_(alphabet) {
    nodes_.push_back({std::vector<uint32_t>(a_, 0), 0});
    uint32_t next_state = 1;
    for (const auto& ctx : contexts) {
        if (ctx.empty())
            continue; // root is state 0
        uint32_t cur = 0;
        for (size_t i = 0; i < ctx.size(); ++i) {
            Symbol sym = ctx[ctx.size() - 1 - i]; // walk from the position backwards
            uint32_t& slot = nodes_[cur].child[sym];
            if (!slot) {
                nodes_.push_back({std::vector<uint32_t>(a_, 0), 0});
                slot = static_cast<uint32_t>(nodes_.size() - 1);
            }
            cur = slot;
        }
        if (nodes_[cur].state == 0)
            nodes_[cur].state = next_state++;
        max_depth_ = std::max<uint32_t>(max_depth_, uint32_t(ctx.size()));
    }
    states_ = next_state;
}

uint32_t ContextResolver::resolve(const Symbol* history, size_t history_len) const {
    uint32_t cur = 0;
    uint32_t deepest = 0;
    for (size_t i = 0; i < history_len; ++i) {
        Symbol sym = history[history_len - 1 - i];
        uint32_t nxt = nodes_[cur].child[sym];
        if (!nxt)
            break;
        cur = nxt;
        if (nodes_[cur].state)
            deepest = nodes_[cur].state;
    }
    return deepest;
}

} // namespace ctz
