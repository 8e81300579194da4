#include "fpiua/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fpiua {

size_t thread_count()
{
    if (const char* env = std::getenv("FPIUA_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return size_t(v);
        } catch (...) {
        }
    }
    size_t h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn)
{
    size_t workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    const size_t chunk = std::max<size_t>(1, n / (workers * 16));
    auto work = [&] {
        while (true) {
            size_t start = next.fetch_add(chunk);
            if (start >= n) return;
            try {
                for (size_t i = start; i < std::min(n, start + chunk); ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> ts;
    for (size_t k = 0; k < workers; ++k) ts.emplace_back(work);
    for (auto& t : ts) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace fpiua
