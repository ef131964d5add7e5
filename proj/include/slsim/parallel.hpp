#ifndef SLSIM_PARALLEL_HPP
#define SLSIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slsim
{

/// Worker count used by row-parallel kernels; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

namespace detail
{
/// True on threads currently executing a parallel_for body; nested loops then run inline.
bool& in_parallel_region();
} // namespace detail

/// Runs fn(i) for i in [begin, end) over the configured worker count, handing out indices dynamically.
/// Nested calls run serially on the calling worker. The first exception thrown by fn is rethrown after
/// all workers stop; remaining indices are skipped.
template < typename Fn >
void parallel_for(int begin, int end, Fn&& fn, unsigned workers = 0)
{
    if (workers == 0)
        workers = thread_count();
    const int n = end - begin;
    if (n <= 0)
        return;
    workers = std::min< unsigned >(workers, unsigned(n));
    if (workers <= 1 || detail::in_parallel_region())
    {
        for (int i = begin; i < end; ++i)
            fn(i);
        return;
    }
    std::atomic< int > next{begin};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        bool& flag = detail::in_parallel_region();
        const bool outer = flag;
        flag = true;
        try
        {
            for (int i = next++; i < end; i = next++)
                fn(i);
        }
        catch (...)
        {
            next = end;
            const std::lock_guard lock(error_mutex);
            if (!error)
                error = std::current_exception();
        }
        flag = outer;
    };
    {
        std::vector< std::jthread > pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w)
            pool.emplace_back(body);
        body();
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace slsim

#endif // SLSIM_PARALLEL_HPP
