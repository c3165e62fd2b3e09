#pragma once

#include <functional>

namespace flamegrad {

/// Number of workers to use for `threads` requested (0 = hardware count).
int resolve_threads(int threads);

/// Run fn(begin, end, chunk) over [0, n) split into one contiguous chunk per
/// worker. Chunk boundaries depend only on (n, threads), so results merged in
/// chunk order are reproducible for a fixed thread count; threads == 1 runs
/// inline.
void parallel_chunks(long long n, int threads,
                     const std::function<void(long long, long long, int)>& fn);

}  // namespace flamegrad
