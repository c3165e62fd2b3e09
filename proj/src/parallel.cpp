#include "flamegrad/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace flamegrad {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(long long n, int threads,
                     const std::function<void(long long, long long, int)>& fn) {
  if (n <= 0) return;
  const int workers = std::min<long long>(resolve_threads(threads), n);
  if (workers <= 1) {
    fn(0, n, 0);
    return;
  }
  const long long per = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const long long begin = w * per;
    const long long end = std::min(n, begin + per);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace flamegrad
