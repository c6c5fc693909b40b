#include "mfbsde/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mfbsde/errors.hpp"

namespace mfbsde {

namespace {

std::atomic<int> g_max_threads{0};

constexpr std::int64_t kChunk = 1024;

}  // namespace

void set_max_threads(int threads) {
    if (threads < 0) throw InvalidArgument("thread cap must be >= 0");
    g_max_threads.store(threads);
}

int max_threads() {
    const int cap = g_max_threads.load();
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int avail = hw > 0 ? hw : 1;
    return cap > 0 ? std::min(cap, avail) : avail;
}

void parallel_for(std::int64_t total, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (total <= 0) return;
    const std::int64_t chunks = (total + kChunk - 1) / kChunk;
    const int workers = static_cast<int>(std::min<std::int64_t>(max_threads(), chunks));
    if (workers <= 1) {
        for (std::int64_t c = 0; c < chunks; ++c) {
            fn(c * kChunk, std::min(total, (c + 1) * kChunk));
        }
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        try {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= chunks) return;
                fn(c * kChunk, std::min(total, (c + 1) * kChunk));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace mfbsde
