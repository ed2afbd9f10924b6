#include "gcrlab/parallel.hpp"

#include <atomic>

namespace gcr {
namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int count) { g_threads.store(std::max(1, count)); }

int thread_count() { return g_threads.load(); }

}  // namespace gcr
