#ifndef CTZ_CLASSIFIER_HPP
#define CTZ_CLASSIFIER_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ctz/context_tree.hpp"
#include "ctz/sequence.hpp"

namespace ctz {

struct SignatureContext {
    std::vector<Symbol> context;
    std::vector<uint64_t> counts; // training successor pair counts, one per symbol
};

// O(N)-size summary of a long training sequence: the selected context set
// with its conditional distributions, H_min, and the calibrated threshold.
class Signature {
public:
    uint16_t alphabet = 2;
    uint32_t block_len = 0; // N
    uint32_t t = 0;         // context horizon at build time
    double epsilon = 0.1;
    double h_min = 0;
    double eps_prime = 0;
    std::vector<SignatureContext> contexts; // canonical order, [0] = root

    uint32_t n_prime() const;  // floor(N^(1-eps))
    uint32_t n_dprime() const; // floor(N^(1-2eps))
    uint32_t max_context_depth() const;
    double log_alphabet() const;
    // -log2 of the stored conditional; zero-count pairs pay the floor penalty
    double stored_cost_bits(uint32_t state, Symbol s) const {
        return cost_[size_t(state) * alphabet + s];
    }
    const ContextResolver& resolver() const { return *resolver_; }

    void finalize(); // build the runtime tables; call after filling fields

    std::vector<uint8_t> serialize() const;
    static Signature parse(const std::vector<uint8_t>& bytes);
    void save(const std::string& path) const;
    static Signature load(const std::string& path);

    // scoring cost of an unseen transition, bits
    static constexpr double zero_penalty_bits = 64.0;

private:
    std::shared_ptr<ContextResolver> resolver_;
    std::vector<double> cost_; // state-major, A entries per state
};

// (1/N) log2 |S_min|: the smallest set of the most probable N-vectors whose
// total probability reaches 1 - tolerance.
double h_min_value(const Sequence& train, uint32_t n, double tolerance);

struct CalibrationReport;

// Two passes over the training sequence: gather contexts appearing at least
// M*N'' times, select the minimizing subset, store its distributions, compute
// H_min(.., eps/2) and calibrate eps'. The calibration report is written to
// `report` when given.
Signature build_signature(const Sequence& train, uint32_t n, double eps,
                          CalibrationReport* report = nullptr);

struct CrossEntropy {
    double cross = 0; // h_u(Z, signature)
    double self = 0;  // Z's own conditional entropy over the same contexts
};
CrossEntropy cross_entropy_h_u(SymbolSpan z, const Signature& sig);

// H_u(t, N', M') evaluated on the test vector itself
double test_self_hu(SymbolSpan z, const Signature& sig, TreeWorkspace* ws = nullptr);

struct ClassificationResult {
    double delta = 0;
    double h_u = 0;     // cross entropy to the signature
    double self_hu = 0; // H_u(t, N', M') of the test vector
    bool accept = false;
    bool escape = false; // the log A escape rule fired
    double eps2 = 0;     // (1/N) log2 |S(Z, mu)|, 0 when mu = 0
};

ClassificationResult classify(SymbolSpan z, const Signature& sig, uint32_t mu = 0,
                              TreeWorkspace* ws = nullptr);

struct CalibrationReport {
    double eps_prime = 0;
    uint64_t windows = 0;
    uint64_t accepted = 0;        // at the calibrated threshold
    uint64_t certified = 0;       // windows settled by the cross-entropy bound
    double analytic_floor = 0;    // eps^2/2 + N^(-eps)
    double mean_cross = 0;
    double max_window_delta = 0;  // over the exactly-evaluated windows
};

// (1-eps)-quantile of Delta over all training windows, floored at the
// analytic default; sets sig.eps_prime.
CalibrationReport calibrate_epsilon_prime(const Sequence& train, Signature& sig);

// min over P of max(D(p||P), D(q||P)), attained on the mixture path;
// bisection on the balance point. Returns the value; fills the witness.
double minmax_divergence(const std::vector<double>& p, const std::vector<double>& q,
                         std::vector<double>* witness = nullptr);

struct AncestorContextReport {
    std::vector<Symbol> context;
    bool shared = false;
    bool feasible = true;
    double divergence = 0; // min-max value for shared contexts
    std::vector<double> witness;
};

struct AncestorReport {
    bool accept = true;
    int32_t first_infeasible = -1; // index into contexts, canonical order
    std::vector<AncestorContextReport> contexts;
};

struct AncestorOptions {
    double eps = 0.05;
    // minimum number of covered occurrences a context needs on each side
    // before it enters the divergence test; phase multiplicities inflate the
    // pair counts, so the probability floor alone admits contexts backed by
    // a handful of transitions. 0 restores the bare probability threshold.
    uint64_t min_support = 0;

    static AncestorOptions with_default_support(double eps, uint16_t alphabet) {
        AncestorOptions o;
        o.eps = eps;
        o.min_support = uint64_t(std::ceil(4.0 * (alphabet - 1) / eps));
        return o;
    }
};

AncestorReport common_ancestor_test(const Sequence& y, const Sequence& z,
                                    const AncestorOptions& opt);
AncestorReport common_ancestor_test(const Sequence& y, const Sequence& z, double eps);

} // namespace ctz

#endif
