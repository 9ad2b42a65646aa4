#ifndef CTZ_THREADING_HPP
#define CTZ_THREADING_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ctz {

// worker cap: CTZ_THREADS when set, otherwise the hardware concurrency
inline unsigned thread_budget() {
    if (const char* env = std::getenv("CTZ_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// index-sharded loop; results must be written to disjoint slots so the
// output order stays deterministic
inline void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
    unsigned workers = thread_budget();
    if (workers <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    workers = std::min<unsigned>(workers, unsigned(count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (size_t i = w; i < count; i += workers)
                fn(i);
        });
    for (auto& t : pool)
        t.join();
}

} // namespace ctz

#endif
