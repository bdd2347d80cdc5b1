#pragma once

// Deterministic parallelism helpers. Every parallel kernel in the library
// computes per-shard partials into preallocated slots and reduces them in a
// fixed order, so results are bit-identical for any thread count. Each
// kernel has a serial twin with the same blocking, kept as the reference
// implementation for tests and the benchmark tool.

#include <cstddef>
#include <functional>
#include <vector>

namespace ordfb {

// Thread budget: min(hardware, ORDFB_THREADS if set). Always >= 1.
int effective_threads();

inline constexpr std::size_t kSumBlock = 1024;

// Blockwise sum of f(0..n-1): per-block partial sums (blocks of kSumBlock),
// block results added in index order. The serial and parallel versions share
// the blocking, hence produce identical bits.
double block_sum_serial(std::size_t n, const std::function<double(std::size_t)>& f);
double block_sum_parallel(std::size_t n, const std::function<double(std::size_t)>& f);

// Runs body(i) for i in [0, n) across threads. Bodies must write only to
// their own slot i of any shared output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
void serial_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Mean and (n-1)-normalized standard deviation, accumulated in index order.
struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;    // 0 when n < 2
    double stderr_mean = 0.0;  // stddev / sqrt(n)
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace ordfb
