#include "bsfscale/list_ops.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

namespace bsf {

SublistPartition partition(std::size_t total, std::size_t parts) {
    if (parts == 0) throw std::invalid_argument("partition: parts must be >= 1");
    SublistPartition split;
    split.total = total;
    split.parts = parts;
    split.ranges.reserve(parts);
    const std::size_t base = total / parts;
    const std::size_t extra = total % parts;
    std::size_t start = 0;
    for (std::size_t p = 0; p < parts; ++p) {
        const std::size_t length = base + (p < extra ? 1 : 0);
        split.ranges.push_back({start, length});
        start += length;
    }
    return split;
}

void InlineExecutor::run(std::vector<std::function<void()>> tasks) {
    for (auto& task : tasks) task();
}

void ThreadExecutor::run(std::vector<std::function<void()>> tasks) {
    if (tasks.empty()) return;
    if (tasks.size() == 1) {
        tasks.front()();
        return;
    }

    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_task = std::numeric_limits<std::size_t>::max();

    std::vector<std::thread> threads;
    threads.reserve(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        threads.emplace_back([&, t] {
            if (failed.load(std::memory_order_acquire)) return;
            try {
                tasks[t]();
            } catch (...) {
                failed.store(true, std::memory_order_release);
                std::lock_guard<std::mutex> lock(error_mutex);
                if (t < first_error_task) {
                    first_error_task = t;
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& thread : threads) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bsf
