#include "ordfb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ordfb {

int effective_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
#ifdef _OPENMP
    hw = std::max(1, std::min(hw, omp_get_max_threads()));
#endif
    if (const char* env = std::getenv("ORDFB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

namespace {

double sum_block(std::size_t lo, std::size_t hi,
                 const std::function<double(std::size_t)>& f) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    return acc;
}

}  // namespace

double block_sum_serial(std::size_t n, const std::function<double(std::size_t)>& f) {
    std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
    double acc = 0.0;
    for (std::size_t b = 0; b < blocks; ++b)
        acc += sum_block(b * kSumBlock, std::min(n, (b + 1) * kSumBlock), f);
    return acc;
}

double block_sum_parallel(std::size_t n, const std::function<double(std::size_t)>& f) {
    std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
    std::vector<double> partial(blocks, 0.0);
    const int threads = effective_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
        std::size_t ub = static_cast<std::size_t>(b);
        partial[ub] = sum_block(ub * kSumBlock, std::min(n, (ub + 1) * kSumBlock), f);
    }
    (void)threads;
    double acc = 0.0;
    for (double p : partial) acc += p;  // fixed order
    return acc;
}

void serial_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int threads = effective_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
    (void)threads;
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    double acc = 0.0;
    for (double v : values) acc += v;
    out.mean = acc / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) {
            double d = v - out.mean;
            ss += d * d;
        }
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        out.stderr_mean = out.stddev / std::sqrt(static_cast<double>(values.size()));
    }
    return out;
}

}  // namespace ordfb
