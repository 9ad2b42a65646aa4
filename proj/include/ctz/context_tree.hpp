#ifndef CTZ_CONTEXT_TREE_HPP
#define CTZ_CONTEXT_TREE_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "ctz/empirical_model.hpp"

namespace ctz {

// A coding context: the symbols preceding a position, in text order
// (context.back() is the symbol immediately before the position).
struct ChosenContext {
    std::vector<Symbol> context;
    double cond_entropy;
};

struct TreeNodeView {
    std::vector<Symbol> context;
    uint64_t count;                 // pair count of the context pattern
    std::vector<uint64_t> succ;     // successor pair counts, one per symbol
    double cond_entropy;            // successor-sum normalized; +inf when no successors
    bool in_tree;
};

struct TreeOptions {
    uint64_t k_num = 1;             // probability floor 1/K, K = k_num/k_den
    uint64_t k_den = 1;
    uint32_t max_depth = 0;         // deepest context considered (D)
    bool keep_nodes = false;        // materialize in-tree nodes
    bool early_stop = false;        // stop after two consecutive levels with no
                                    // in-tree node (production paths)
    // restrict membership to these contexts (classifier first pass)
    const std::vector<std::vector<Symbol>>* allowed = nullptr;
};

class TreeWorkspace;

struct TreeAnalysis {
    uint32_t depth_cap = 0;
    uint32_t history_depth = 0;     // depth of the histories the average runs over
    uint32_t deepest_in_tree = 0;
    uint64_t in_tree_nodes = 0;     // excluding the root
    double root_entropy = 0;
    double h_u = 0;                 // achieved value, bits per letter
    std::vector<ChosenContext> chosen;   // canonical (length, lex) order
    std::vector<TreeNodeView> nodes;     // when keep_nodes; nodes[0] = root
};

TreeAnalysis analyze_contexts(const EmpiricalModel& model, const TreeOptions& opt,
                              TreeWorkspace* ws = nullptr);

// Candidate context tree of one block: all contexts of length <= t-1 whose
// stride-t probability is at least 1/K, annotated with successor counts and
// conditional entropies. X is modeled as M' = |X|/t sub-blocks of length t.
class ContextTree {
public:
    static ContextTree build(const Sequence& x, uint64_t floor_inverse_k, uint32_t t);
    static ContextTree build(const EmpiricalModel& model, uint64_t k_num, uint64_t k_den,
                             uint32_t max_depth);

    const TreeAnalysis& analysis() const { return a_; }
    const std::vector<TreeNodeView>& nodes() const { return a_.nodes; }
    size_t context_count() const { return a_.nodes.empty() ? 0 : a_.nodes.size() - 1; }
    const TreeNodeView* find(SymbolSpan ctx) const;

private:
    TreeAnalysis a_;
};

// The selected contexts and the achieved entropy functional.
struct PrunedTree {
    std::vector<ChosenContext> contexts;  // canonical (length, lex) order
    double h_u = 0;
    uint32_t max_depth = 0;
};

PrunedTree select_optimal_contexts(const ContextTree& tree);

// Depth-selection rule: min[j-1, t] for the smallest j such that the last j
// symbols of z have probability <= 1/K; -1 when no such j <= |z| exists.
int32_t k1_depth(const EmpiricalModel& model, SymbolSpan z, uint64_t k);

// Convenience composition on X_1^{MN} with block length N and floor 1/K.
double h_u_value(const Sequence& x, uint32_t n, uint64_t k, uint32_t m);
double h_u_value(const Sequence& x, uint32_t n, uint64_t k_num, uint64_t k_den, uint32_t m);

// Deepest-match resolution over a context set: the coder conditions on the
// longest stored context that is a suffix of the history, root fallback.
class ContextResolver {
public:
    ContextResolver(uint16_t alphabet, const std::vector<std::vector<Symbol>>& contexts);

    // history = the symbols before the current position; state 0 is the root
    uint32_t resolve(const Symbol* history, size_t history_len) const;
    uint32_t state_count() const { return states_; }
    uint32_t max_depth() const { return max_depth_; }

private:
    struct Node {
        std::vector<uint32_t> child; // alphabet-indexed, 0 = none
        uint32_t state;
    };
    uint16_t a_;
    uint32_t states_;
    uint32_t max_depth_ = 0;
    std::vector<Node> nodes_;
};

// Reusable buffers for analyze_contexts; all levels of one analysis stay
// alive so suffix chains can be resolved exactly. Counts are 32-bit: a
// single analysis is limited to 2^32 phase pairs (a 4G-symbol source).
class TreeWorkspace {
public:
    struct Level {
        std::vector<uint32_t> slots;     // pow2 open addressing, entry id + 1
        std::vector<uint64_t> hash;
        std::vector<uint32_t> pos;       // witness start
        std::vector<uint32_t> count;
        std::vector<uint32_t> chain_lev; // level whose best this entry inherits
        std::vector<uint32_t> chain_id;
        std::vector<uint32_t> succ;      // n * A successor counts
        std::vector<double> best_h;
        std::vector<uint32_t> best_lev;
        std::vector<uint32_t> best_pos;
        std::vector<uint32_t> ids;       // position -> entry id
        size_t n = 0;
        size_t mask = 0;

        void prepare(size_t cov, uint16_t a);
        int64_t find(const Symbol* src, const Symbol* content, uint64_t h, uint32_t len) const;
    };
    std::vector<Level> levels;           // levels[l] holds length-l patterns, l >= 1
};

} // namespace ctz

#endif
