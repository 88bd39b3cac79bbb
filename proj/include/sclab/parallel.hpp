#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sclab {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;  // standard error of the mean
    long long count = 0;
};

/// Mean and standard error, reduced in index order so the result does not
/// depend on how the values were produced.
inline SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.count = static_cast<long long>(xs.size());
    if (xs.empty()) return s;
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    s.mean = sum.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        CompensatedSum sq;
        for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
        const double var = sq.value() / static_cast<double>(xs.size() - 1);
        s.std_error = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return s;
}

/// Number of worker threads used when a caller passes 0.
inline int default_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

/// Evaluates fn(r) for r = 0..count-1 on `workers` threads and returns the
/// results indexed by r. fn must only depend on r (per-replica RNG streams),
/// which makes the output independent of the worker count.
template <class Fn>
auto run_replicas(long long count, int workers, Fn&& fn) -> std::vector<decltype(fn(0LL))> {
    using T = decltype(fn(0LL));
    std::vector<T> out(static_cast<std::size_t>(count));
    if (workers <= 0) workers = default_workers();
    workers = static_cast<int>(std::min<long long>(workers, std::max(1LL, count)));
    if (workers == 1) {
        for (long long r = 0; r < count; ++r) out[static_cast<std::size_t>(r)] = fn(r);
        return out;
    }
    std::atomic<long long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            try {
                for (long long r = next++; r < count; r = next++) out[static_cast<std::size_t>(r)] = fn(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace sclab
