#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace relayguard {

/// Undirected random k-regular overlay. Neighbor lists are sorted.
class Overlay {
public:
    std::size_t n_nodes() const noexcept { return adjacency_.size(); }
    std::size_t degree() const noexcept { return degree_; }
    std::uint64_t seed() const noexcept { return seed_; }
    /// Connectivity retries consumed before a connected graph came out.
    std::uint64_t salt() const noexcept { return salt_; }

    std::span<const std::size_t> neighbors(std::size_t node) const { return adjacency_.at(node); }
    bool adjacent(std::size_t a, std::size_t b) const;
    bool connected() const;

    /// One `a b` line per edge with a < b, in lexicographic order.
    void write_edge_list(std::ostream& out) const;

    friend Overlay build_overlay(std::size_t n, std::size_t k, std::uint64_t seed);

private:
    std::vector<std::vector<std::size_t>> adjacency_;
    std::size_t degree_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t salt_ = 0;
};

/// Connected random k-regular graph on n nodes, deterministic in seed.
/// Pairs endpoints one suitable pair at a time (no loops, no repeated
/// edges) and restarts with a fresh salt on a dead end or a disconnected
/// result. Throws Error(InfeasibleDegree) when n*k is odd, k >= n, or no
/// connected graph exists (k == 0 or k == 1 with n > 2).
Overlay build_overlay(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace relayguard
