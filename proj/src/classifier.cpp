#include "ctz/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "ctz/bitio.hpp"

namespace ctz {

namespace {

uint32_t power_floor(uint32_t n, double exponent) {
    double v = std::pow(double(n), exponent);
    return std::max<uint32_t>(1, uint32_t(v + 1e-9));
}

uint32_t classifier_t(uint32_t n) {
    return std::max<uint32_t>(1, std::min(log2_squared(n), n / 2));
}

uint16_t be16(const uint8_t* p) { return uint16_t((uint16_t(p[0]) << 8) | p[1]); }
uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}
uint64_t be64(const uint8_t* p) { return (uint64_t(be32(p)) << 32) | be32(p + 4); }

// weighted per-history cross/self entropies of a test model against the
// stored conditionals; histories at the signature's context depth
CrossEntropy cross_from_model(const EmpiricalModel& m, const Signature& sig) {
    const uint16_t A = sig.alphabet;
    const Symbol* src = m.source().data();
    uint32_t d = std::min(sig.max_context_depth(), m.depth());

    CrossEntropy out;
    double wsum = 0, cross = 0, self = 0;

    if (d == 0) {
        const LevelTable& l1 = m.level(1);
        std::vector<uint64_t> succ(A, 0);
        for (const auto& e : l1.entries())
            succ[src[e.pos]] += e.count;
        uint64_t S = 0;
        for (uint16_t a = 0; a < A; ++a)
            S += succ[a];
        if (!S)
            return out;
        for (uint16_t a = 0; a < A; ++a) {
            if (!succ[a])
                continue;
            double p = double(succ[a]) / double(S);
            cross += p * sig.stored_cost_bits(0, Symbol(a));
            self -= p * std::log2(p);
        }
        out.cross = cross;
        out.self = self;
        return out;
    }

    const LevelTable& ld = m.level(d);
    const LevelTable& ld1 = m.level(d + 1);
    const SubstringHasher& hasher = m.hasher();

    // successor mass of each depth-d history, grouped from the (d+1)-windows
    std::vector<uint64_t> succ(ld.entries().size() * A, 0);
    for (const auto& e1 : ld1.entries()) {
        int64_t id = ld.find(src + e1.pos, hasher.window(e1.pos, d));
        if (id < 0)
            continue;
        succ[size_t(id) * A + src[e1.pos + d]] += e1.count;
    }

    for (size_t id = 0; id < ld.entries().size(); ++id) {
        const auto& e = ld.entries()[id];
        const uint64_t* sc = succ.data() + id * A;
        uint64_t S = 0;
        for (uint16_t a = 0; a < A; ++a)
            S += sc[a];
        if (!S)
            continue;
        uint32_t state = sig.resolver().resolve(src + e.pos, d);
        double w = double(e.count);
        double cw = 0, sw = 0;
        for (uint16_t a = 0; a < A; ++a) {
            if (!sc[a])
                continue;
            double p = double(sc[a]) / double(S);
            cw += p * sig.stored_cost_bits(state, Symbol(a));
            sw -= p * std::log2(p);
        }
        cross += w * cw;
        self += w * sw;
        wsum += w;
    }
    if (wsum > 0) {
        out.cross = cross / wsum;
        out.self = self / wsum;
    }
    return out;
}

} // namespace

uint32_t Signature::n_prime() const { return power_floor(block_len, 1.0 - epsilon); }
uint32_t Signature::n_dprime() const { return power_floor(block_len, 1.0 - 2.0 * epsilon); }
double Signature::log_alphabet() const { return std::log2(double(alphabet)); }

uint32_t Signature::max_context_depth() const {
    uint32_t d = 0;
    for (const auto& c : contexts)
        d = std::max<uint32_t>(d, uint32_t(c.context.size()));
    return d;
}

void Signature::finalize() {
    if (contexts.empty() || !contexts[0].context.empty())
        throw FormatError("signature must store the root context first");
    std::vector<std::vector<Symbol>> ctxs;
    for (const auto& c : contexts)
        ctxs.push_back(c.context);
    resolver_ = std::make_shared<ContextResolver>(alphabet, ctxs);
    if (resolver_->state_count() != contexts.size())
        throw FormatError("duplicate contexts in signature");
    cost_.assign(contexts.size() * alphabet, zero_penalty_bits);
    for (size_t i = 0; i < contexts.size(); ++i) {
        uint64_t total = 0;
        for (uint64_t c : contexts[i].counts)
            total += c;
        if (!total)
            continue;
        for (uint16_t a = 0; a < alphabet; ++a) {
            uint64_t c = contexts[i].counts[a];
            if (c)
                cost_[i * alphabet + a] = -std::log2(double(c) / double(total));
        }
    }
}

std::vector<uint8_t> Signature::serialize() const {
    std::vector<uint8_t> v;
    v.push_back('Z');
    v.push_back('S');
    v.push_back('I');
    v.push_back('G');
    v.push_back(1);
    put_u16_be(v, alphabet);
    put_u32_be(v, block_len);
    put_u32_be(v, t);
    put_u64_be(v, uint64_t(std::llround(epsilon * 4294967296.0))); // Q32.32
    put_u64_be(v, std::bit_cast<uint64_t>(h_min));
    put_u64_be(v, std::bit_cast<uint64_t>(eps_prime));
    put_u32_be(v, uint32_t(contexts.size()));
    for (const auto& c : contexts) {
        put_u16_be(v, uint16_t(c.context.size()));
        v.insert(v.end(), c.context.begin(), c.context.end());
        for (uint16_t a = 0; a < alphabet; ++a)
            put_u64_be(v, c.counts[a]);
    }
    return v;
}

Signature Signature::parse(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 43)
        throw FormatError("signature too short");
    if (std::memcmp(bytes.data(), "ZSIG", 4) != 0)
        throw FormatError("bad signature magic");
    if (bytes[4] != 1)
        throw FormatError("unsupported signature version");
    Signature s;
    s.alphabet = be16(bytes.data() + 5);
    s.block_len = be32(bytes.data() + 7);
    s.t = be32(bytes.data() + 11);
    s.epsilon = double(be64(bytes.data() + 15)) / 4294967296.0;
    s.h_min = std::bit_cast<double>(be64(bytes.data() + 23));
    s.eps_prime = std::bit_cast<double>(be64(bytes.data() + 31));
    uint32_t count = be32(bytes.data() + 39);
    size_t pos = 43;
    for (uint32_t i = 0; i < count; ++i) {
        if (pos + 2 > bytes.size())
            throw FormatError("signature truncated");
        uint16_t len = be16(bytes.data() + pos);
        pos += 2;
        if (pos + len + size_t(s.alphabet) * 8 > bytes.size())
            throw FormatError("signature truncated");
        SignatureContext c;
        c.context.assign(bytes.begin() + pos, bytes.begin() + pos + len);
        pos += len;
        c.counts.resize(s.alphabet);
        for (uint16_t a = 0; a < s.alphabet; ++a) {
            c.counts[a] = be64(bytes.data() + pos);
            pos += 8;
        }
        s.contexts.push_back(std::move(c));
    }
    s.finalize();
    return s;
}

void Signature::save(const std::string& path) const { write_binary_file(path, serialize()); }

Signature Signature::load(const std::string& path) {
    return parse(read_binary_file(path));
}

double h_min_value(const Sequence& train, uint32_t n, double tolerance) {
    if (train.size() < size_t(2) * n)
        throw ParamError("training sequence shorter than 2N");
    if (tolerance <= 0.0 || tolerance >= 1.0)
        throw ParamError("tolerance must lie in (0,1)");
    EmpiricalModel m(train, n, 1);
    const LevelTable& full = m.full_window_table();
    std::vector<uint64_t> counts;
    counts.reserve(full.entries().size());
    uint64_t total = 0;
    for (const auto& e : full.entries()) {
        counts.push_back(e.count);
        total += e.count;
    }
    std::sort(counts.begin(), counts.end(), std::greater<>());
    long double need = (1.0L - (long double)tolerance) * (long double)total;
    long double acc = 0;
    size_t k = 0;
    while (k < counts.size() && acc < need) {
        acc += (long double)counts[k];
        ++k;
    }
    return std::log2(double(std::max<size_t>(1, k))) / double(n);
}

Signature build_signature(const Sequence& train, uint32_t n, double eps,
                          CalibrationReport* report) {
    if (eps <= 0.0 || eps >= 0.5)
        throw ParamError("epsilon must lie in (0, 1/2)");
    if (train.size() < size_t(2) * n)
        throw ParamError("training sequence shorter than 2N");
    const uint16_t A = train.alpha_size();
    const uint32_t t = classifier_t(n);
    const uint32_t M = uint32_t(train.size() / n);

    Signature sig;
    sig.alphabet = A;
    sig.block_len = n;
    sig.t = t;
    sig.epsilon = eps;

    // First pass: contexts no longer than t appearing at least M*N'' times
    // (plain occurrence counts are monotone in the length, so the scan stops
    // at the first level with no survivor).
    const uint64_t threshold = uint64_t(M) * sig.n_dprime();
    std::vector<std::vector<Symbol>> allowed;
    SubstringHasher hasher(train.span());
    uint32_t max_len = std::min<uint32_t>(t, uint32_t(train.size()) - 1);
    for (uint32_t len = 1; len <= max_len; ++len) {
        LevelTable table(train.data(), len, train.size() - len + 1);
        for (size_t s = 0; s + len <= train.size(); ++s)
            table.add(hasher.window(s, len), uint32_t(s), 1);
        size_t survivors = 0;
        for (const auto& e : table.entries())
            if (e.count >= threshold) {
                allowed.emplace_back(train.data() + e.pos, train.data() + e.pos + len);
                ++survivors;
            }
        if (!survivors)
            break;
    }

    // Second pass: run the per-history minimization restricted to the
    // gathered contexts, with the 1/N'' probability floor.
    uint32_t depth = std::min(t, n - 1);
    EmpiricalModel model(train, n, depth);
    TreeOptions opt;
    opt.k_num = sig.n_dprime();
    opt.max_depth = depth;
    opt.early_stop = true;
    opt.allowed = &allowed;
    TreeAnalysis an = analyze_contexts(model, opt);

    auto store = [&](const std::vector<Symbol>& ctx) {
        SignatureContext sc;
        sc.context = ctx;
        sc.counts.assign(A, 0);
        if (ctx.empty()) {
            for (const auto& e : model.level(1).entries())
                sc.counts[train[e.pos]] += e.count;
        } else {
            const LevelTable& next = model.level(uint32_t(ctx.size()) + 1);
            std::vector<Symbol> buf = ctx;
            buf.push_back(0);
            for (uint16_t a = 0; a < A; ++a) {
                buf[ctx.size()] = Symbol(a);
                sc.counts[a] =
                    next.count_of(buf.data(), SubstringHasher::of(buf.data(), buf.size()));
            }
        }
        sig.contexts.push_back(std::move(sc));
    };

    store({}); // root first, always present
    for (const auto& c : an.chosen)
        if (!c.context.empty())
            store(c.context);

    sig.h_min = h_min_value(train, n, eps / 2.0);
    sig.finalize();
    CalibrationReport rep = calibrate_epsilon_prime(train, sig);
    if (report)
        *report = rep;
    return sig;
}

CrossEntropy cross_entropy_h_u(SymbolSpan z, const Signature& sig) {
    if (z.size() != sig.block_len)
        throw ParamError("test vector length mismatch");
    uint32_t d = std::min(sig.max_context_depth(), sig.t - 1);
    Sequence zs(Alphabet(sig.alphabet), std::vector<Symbol>(z.begin(), z.end()));
    EmpiricalModel m(std::move(zs), sig.t, d);
    return cross_from_model(m, sig);
}

double test_self_hu(SymbolSpan z, const Signature& sig, TreeWorkspace* ws) {
    if (z.size() != sig.block_len)
        throw ParamError("test vector length mismatch");
    Sequence zs(Alphabet(sig.alphabet), std::vector<Symbol>(z.begin(), z.end()));
    EmpiricalModel m(std::move(zs), sig.t, sig.t - 1);
    TreeOptions opt;
    opt.k_num = sig.n_prime();
    opt.max_depth = sig.t - 1;
    opt.early_stop = true;
    return analyze_contexts(m, opt, ws).h_u;
}

namespace {

// Hamming ball enumeration for the distorted minimum; N <= 20 guarded upstream
void enumerate_ball(std::vector<Symbol>& z, uint32_t from, uint32_t flips_left, uint16_t a,
                    uint64_t& count, const Signature& sig, double& best_cross) {
    {
        CrossEntropy ce = cross_entropy_h_u(SymbolSpan(z.data(), z.size()), sig);
        best_cross = std::min(best_cross, ce.cross);
        ++count;
    }
    if (!flips_left)
        return;
    for (uint32_t i = from; i < z.size(); ++i) {
        Symbol orig = z[i];
        for (uint16_t s = 0; s < a; ++s) {
            if (Symbol(s) == orig)
                continue;
            z[i] = Symbol(s);
            enumerate_ball(z, i + 1, flips_left - 1, a, count, sig, best_cross);
        }
        z[i] = orig;
    }
}

} // namespace

ClassificationResult classify(SymbolSpan z, const Signature& sig, uint32_t mu,
                              TreeWorkspace* ws) {
    if (z.size() != sig.block_len)
        throw ParamError("test vector length mismatch");
    if (mu > 0 && sig.block_len > 20)
        throw ParamError("distortion radius requires N <= 20 (exhaustive search)");

    ClassificationResult r;
    Sequence zs(Alphabet(sig.alphabet), std::vector<Symbol>(z.begin(), z.end()));
    EmpiricalModel m(std::move(zs), sig.t, sig.t - 1);
    TreeOptions opt;
    opt.k_num = sig.n_prime();
    opt.max_depth = sig.t - 1;
    opt.early_stop = true;
    r.self_hu = analyze_contexts(m, opt, ws).h_u;

    if (mu == 0) {
        r.h_u = cross_from_model(m, sig).cross;
        r.eps2 = 0;
    } else {
        std::vector<Symbol> buf(z.begin(), z.end());
        uint64_t ball = 0;
        double best = std::numeric_limits<double>::infinity();
        enumerate_ball(buf, 0, mu, sig.alphabet, ball, sig, best);
        r.h_u = best;
        r.eps2 = std::log2(double(ball)) / double(sig.block_len);
    }

    r.delta = r.h_u - std::min(r.self_hu, sig.h_min);
    r.accept = r.delta <= sig.eps_prime;
    if (r.self_hu + sig.eps_prime > sig.log_alphabet()) {
        r.escape = true;
        r.accept = true;
    }
    return r;
}

CalibrationReport calibrate_epsilon_prime(const Sequence& train, Signature& sig) {
    const uint32_t n = sig.block_len;
    if (train.size() < n)
        throw ParamError("training sequence shorter than N");
    const uint64_t W = train.size() - n + 1;
    CalibrationReport rep;
    rep.windows = W;
    rep.analytic_floor =
        0.5 * sig.epsilon * sig.epsilon + std::pow(double(n), -sig.epsilon);
    const double f = rep.analytic_floor;
    const uint64_t K = uint64_t(std::ceil((1.0 - sig.epsilon) * double(W)));

    // Delta_j <= cross_j always (the subtracted minimum is nonnegative), so a
    // window whose cross entropy is already at or below the floor can never
    // raise the quantile above it; only the rest need the full evaluation.
    std::vector<uint32_t> uncertain;
    double cross_sum = 0;
    for (uint64_t j = 0; j < W; ++j) {
        CrossEntropy ce = cross_entropy_h_u(train.window(j, n), sig);
        cross_sum += ce.cross;
        if (ce.cross <= f)
            ++rep.certified;
        else
            uncertain.push_back(uint32_t(j));
    }
    rep.mean_cross = cross_sum / double(W);

    TreeWorkspace ws;
    std::vector<double> deltas;
    std::vector<double> selfs;
    deltas.reserve(uncertain.size());
    selfs.reserve(uncertain.size());
    for (uint32_t j : uncertain) {
        SymbolSpan w = train.window(j, n);
        Sequence zsq(Alphabet(sig.alphabet), std::vector<Symbol>(w.begin(), w.end()));
        EmpiricalModel m(std::move(zsq), sig.t, sig.t - 1);
        TreeOptions opt;
        opt.k_num = sig.n_prime();
        opt.max_depth = sig.t - 1;
        opt.early_stop = true;
        double self_hu = analyze_contexts(m, opt, &ws).h_u;
        double cross = cross_from_model(m, sig).cross;
        deltas.push_back(cross - std::min(self_hu, sig.h_min));
        selfs.push_back(self_hu);
        rep.max_window_delta = std::max(rep.max_window_delta, deltas.back());
    }

    uint64_t below = rep.certified;
    for (double d : deltas)
        if (d <= f)
            ++below;
    double eps_prime = f;
    if (below < K) {
        std::vector<double> above;
        for (double d : deltas)
            if (d > f)
                above.push_back(d);
        std::sort(above.begin(), above.end());
        eps_prime = above[size_t(K - below - 1)];
    }
    sig.eps_prime = std::max(eps_prime, f);
    rep.eps_prime = sig.eps_prime;

    rep.accepted = rep.certified;
    const double log_a = sig.log_alphabet();
    for (size_t i = 0; i < deltas.size(); ++i)
        if (deltas[i] <= sig.eps_prime || selfs[i] + sig.eps_prime > log_a)
            ++rep.accepted;
    return rep;
}

double minmax_divergence(const std::vector<double>& p, const std::vector<double>& q,
                         std::vector<double>* witness) {
    const size_t a = p.size();
    auto div = [&](const std::vector<double>& v, const std::vector<double>& w) {
        double d = 0;
        for (size_t i = 0; i < a; ++i) {
            if (v[i] <= 0)
                continue;
            if (w[i] <= 0)
                return std::numeric_limits<double>::infinity();
            d += v[i] * std::log2(v[i] / w[i]);
        }
        return std::max(0.0, d);
    };
    auto mix = [&](double lam) {
        std::vector<double> m(a);
        for (size_t i = 0; i < a; ++i)
            m[i] = (1.0 - lam) * p[i] + lam * q[i];
        return m;
    };
    if (p == q) {
        if (witness)
            *witness = p;
        return 0.0;
    }
    // D(p || mix) grows with lambda while D(q || mix) falls; the min of the
    // max sits where they balance
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        auto m = mix(mid);
        double dp = div(p, m), dq = div(q, m);
        if (dp < dq)
            lo = mid;
        else
            hi = mid;
    }
    double lam = 0.5 * (lo + hi);
    auto m = mix(lam);
    if (witness)
        *witness = m;
    return std::max(div(p, m), div(q, m));
}

AncestorReport common_ancestor_test(const Sequence& y, const Sequence& z,
                                    const AncestorOptions& opt) {
    if (y.size() != z.size())
        throw ParamError("the two sequences must share a length");
    if (y.alpha_size() != z.alpha_size())
        throw ParamError("the two sequences must share an alphabet");
    const uint32_t n = uint32_t(y.size());
    const uint16_t A = y.alpha_size();
    const uint32_t t = classifier_t(n);
    const uint32_t depth = t > 1 ? t - 1 : 1;

    EmpiricalModel my(y, t, depth);
    EmpiricalModel mz(z, t, depth);
    const long double thr_scale = std::pow((long double)n, (long double)(1.0 - opt.eps));

    // contexts above the 1/N^(1-eps) floor (and the occurrence support floor)
    auto gather = [&](const EmpiricalModel& m) {
        std::map<std::vector<Symbol>, uint64_t> out;
        for (uint32_t len = 1; len <= depth; ++len) {
            for (const auto& e : m.level(len).entries()) {
                if ((long double)e.count * thr_scale < (long double)m.pair_total())
                    continue;
                if (e.occ < opt.min_support)
                    continue;
                out[std::vector<Symbol>(m.source().data() + e.pos,
                                        m.source().data() + e.pos + len)] = e.count;
            }
        }
        return out;
    };
    auto ymap = gather(my);
    auto zmap = gather(mz);

    // successor-sum normalized conditional of a context; empty when no mass
    auto conditional = [&](const EmpiricalModel& m, const std::vector<Symbol>& ctx) {
        std::vector<double> dist;
        const LevelTable& next = m.level(uint32_t(ctx.size()) + 1);
        std::vector<Symbol> buf = ctx;
        buf.push_back(0);
        uint64_t total = 0;
        std::vector<uint64_t> c(A, 0);
        for (uint16_t a = 0; a < A; ++a) {
            buf[ctx.size()] = Symbol(a);
            c[a] = next.count_of(buf.data(), SubstringHasher::of(buf.data(), buf.size()));
            total += c[a];
        }
        if (!total)
            return dist;
        dist.resize(A);
        for (uint16_t a = 0; a < A; ++a)
            dist[a] = double(c[a]) / double(total);
        return dist;
    };

    std::map<std::vector<Symbol>, int> side;
    for (auto& [c, cnt] : ymap)
        side[c] |= 1;
    for (auto& [c, cnt] : zmap)
        side[c] |= 2;

    std::vector<std::pair<std::vector<Symbol>, int>> ordered(side.begin(), side.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size())
            return a.first.size() < b.first.size();
        return a.first < b.first;
    });

    AncestorReport rep;
    for (auto& [ctx, mask] : ordered) {
        AncestorContextReport cr;
        cr.context = ctx;
        auto py = (mask & 1) ? conditional(my, ctx) : std::vector<double>{};
        auto pz = (mask & 2) ? conditional(mz, ctx) : std::vector<double>{};
        cr.shared = !py.empty() && !pz.empty();
        if (cr.shared) {
            cr.divergence = minmax_divergence(py, pz, &cr.witness);
            cr.feasible = cr.divergence <= opt.eps + 1e-12;
        } else {
            cr.witness = py.empty() ? pz : py;
            cr.divergence = 0;
            cr.feasible = true;
        }
        if (!cr.feasible && rep.first_infeasible < 0)
            rep.first_infeasible = int32_t(rep.contexts.size());
        rep.accept = rep.accept && cr.feasible;
        rep.contexts.push_back(std::move(cr));
    }
    return rep;
}

AncestorReport common_ancestor_test(const Sequence& y, const Sequence& z, double eps) {
    AncestorOptions o;
    o.eps = eps;
    return common_ancestor_test(y, z, o);
}

} // namespace ctz
