#include "slsim/parallel.hpp"

namespace slsim
{
namespace
{
std::atomic< unsigned > g_threads{0};
}

void set_thread_count(unsigned n) { g_threads = n; }

bool& detail::in_parallel_region()
{
    thread_local bool flag = false;
    return flag;
}

unsigned thread_count()
{
    const unsigned n = g_threads.load();
    if (n != 0)
        return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace slsim
