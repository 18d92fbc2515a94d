#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dlocal
{
    /// Runs fn(i) for i in [0, count) on up to `workers` threads. Results must be written
    /// to per-index slots by fn; the first exception is rethrown after all threads join.
    template <class Fn>
    void parallel_for(std::size_t count, int workers, Fn&& fn)
    {
        if (workers <= 1 || count <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mu;
        auto body = [&] {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mu);
                    if (!error)
                        error = std::current_exception();
                }
            }
        };
        const auto n = static_cast<std::size_t>(workers) < count ? static_cast<std::size_t>(workers) : count;
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (std::size_t t = 0; t < n; ++t)
            pool.emplace_back(body);
        for (auto& t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

} // namespace dlocal
