#ifndef SATFUSE_PARALLEL_HPP
#define SATFUSE_PARALLEL_HPP

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace satfuse {

/// Runs fn(0..count-1) on up to `threads` workers. Tasks must write to
/// disjoint state (one band each); results are then independent of the
/// thread count.
inline void parallel_for_tasks(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    int next = 0;
    std::mutex next_mutex;
    const int workers = std::min(threads, count);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                int i;
                {
                    std::lock_guard lock(next_mutex);
                    if (next >= count) return;
                    i = next++;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace satfuse

#endif
