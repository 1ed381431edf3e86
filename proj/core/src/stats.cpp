#include "relayguard/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relayguard/errors.hpp"

namespace relayguard {

std::size_t nearest_rank_index(std::size_t n, double q) {
    // q*n is exact for the integer-valued q used in practice, so an integral
    // rank comes out of the division without rounding noise.
    const double rank = std::ceil(q * static_cast<double>(n) / 100.0);
    if (rank <= 1.0) return 0;
    const auto idx = static_cast<std::size_t>(rank) - 1;
    return std::min(idx, n - 1);
}

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(Errc::EmptyInput, "percentile of an empty sequence");
    return sorted[nearest_rank_index(sorted.size(), q)];
}

double percentile(std::span<const double> values, double q) {
    if (values.empty()) throw Error(Errc::EmptyInput, "percentile of an empty sequence");
    std::vector<double> copy(values.begin(), values.end());
    const auto idx = nearest_rank_index(copy.size(), q);
    std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(idx), copy.end());
    return copy[idx];
}

RollingQuantile::RollingQuantile(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("RollingQuantile capacity must be positive");
    sorted_.reserve(capacity + 1);
}

void RollingQuantile::push(double value) {
    if (arrival_.size() == capacity_) {
        const double oldest = arrival_.front();
        arrival_.pop_front();
        auto it = std::lower_bound(sorted_.begin(), sorted_.end(), oldest);
        sorted_.erase(it);
    }
    arrival_.push_back(value);
    sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), value), value);
}

double RollingQuantile::quantile(double q) const {
    return percentile_sorted(sorted_, q);
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(sq / static_cast<double>(values.size()));
    return out;
}

}  // namespace relayguard
