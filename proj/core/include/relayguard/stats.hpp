#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace relayguard {

/// Nearest-rank percentile: sorts a copy ascending and returns the element
/// at index ceil(q/100 * n) - 1, clamped to [0, n-1]. Throws
/// Error(EmptyInput) on an empty input.
double percentile(std::span<const double> values, double q);

/// Same rule applied to a range that is already sorted ascending.
double percentile_sorted(std::span<const double> sorted, double q);

/// Index selected by the nearest-rank rule for a population of size n > 0.
std::size_t nearest_rank_index(std::size_t n, double q);

/// Sliding window over the last `capacity` values with O(1) nearest-rank
/// queries. Keeps the arrival order for eviction alongside a sorted copy.
class RollingQuantile {
public:
    explicit RollingQuantile(std::size_t capacity);

    void push(double value);

    /// Requires size() > 0.
    double quantile(double q) const;

    std::size_t size() const noexcept { return arrival_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return arrival_.empty(); }

    const std::deque<double>& arrival_order() const noexcept { return arrival_; }

private:
    std::size_t capacity_;
    std::deque<double> arrival_;
    std::vector<double> sorted_;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

}  // namespace relayguard
