#include "relayguard/overlay.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>

#include "relayguard/errors.hpp"
#include "relayguard/random.hpp"

namespace relayguard {

namespace {

constexpr std::uint64_t kMaxSalts = 10000;

using Adjacency = std::vector<std::vector<std::size_t>>;

bool has_edge(const Adjacency& adj, std::size_t a, std::size_t b) {
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
}

// One pairing attempt; nullopt on a dead end.
std::optional<Adjacency> try_pairing(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> points;
    points.reserve(n * k);
    for (std::size_t v = 0; v < n; ++v) points.insert(points.end(), k, v);
    Adjacency adj(n);
    for (auto& a : adj) a.reserve(k);

    auto suitable = [&](std::size_t i, std::size_t j) {
        const auto a = points[i], b = points[j];
        return a != b && !has_edge(adj, a, b);
    };

    while (!points.empty()) {
        const auto m = points.size();
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        std::size_t i = 0, j = 0;
        bool found = false;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
            i = pick(rng);
            j = pick(rng);
            found = i != j && suitable(i, j);
        }
        if (!found) {
            // Rejection stalled; check whether any suitable pair remains.
            std::vector<std::pair<std::size_t, std::size_t>> options;
            for (std::size_t x = 0; x < m; ++x) {
                for (std::size_t y = x + 1; y < m; ++y) {
                    if (suitable(x, y)) options.emplace_back(x, y);
                }
            }
            if (options.empty()) return std::nullopt;
            std::uniform_int_distribution<std::size_t> opt(0, options.size() - 1);
            std::tie(i, j) = options[opt(rng)];
        }
        const auto a = points[i], b = points[j];
        adj[a].push_back(b);
        adj[b].push_back(a);
        if (i < j) std::swap(i, j);
        points[i] = points.back();
        points.pop_back();
        points[j] = points.back();
        points.pop_back();
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

bool is_connected(const Adjacency& adj) {
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == adj.size();
}

}  // namespace

bool Overlay::adjacent(std::size_t a, std::size_t b) const {
    const auto& na = adjacency_.at(a);
    return std::binary_search(na.begin(), na.end(), b);
}

bool Overlay::connected() const { return is_connected(adjacency_); }

void Overlay::write_edge_list(std::ostream& out) const {
    for (std::size_t a = 0; a < adjacency_.size(); ++a) {
        for (auto b : adjacency_[a]) {
            if (a < b) out << a << ' ' << b << '\n';
        }
    }
}

Overlay build_overlay(std::size_t n, std::size_t k, std::uint64_t seed) {
    const auto infeasible = [&](const std::string& why) {
        return Error(Errc::InfeasibleDegree,
                     "no connected " + std::to_string(k) + "-regular graph on " + std::to_string(n) + " nodes: " + why);
    };
    if (n == 0) throw infeasible("empty overlay");
    if (k >= n && !(n == 1 && k == 0)) throw infeasible("degree must be below node count");
    if ((n * k) % 2 != 0) throw infeasible("n*k is odd");
    if (n > 1 && k == 0) throw infeasible("degree 0 is disconnected");
    if (n > 2 && k == 1) throw infeasible("a perfect matching is disconnected");

    for (std::uint64_t salt = 0; salt < kMaxSalts; ++salt) {
        Rng rng = make_rng(seed, {0x6f7665726c6179ULL, salt});
        auto adj = try_pairing(n, k, rng);
        if (!adj || !is_connected(*adj)) continue;
        Overlay o;
        o.adjacency_ = std::move(*adj);
        o.degree_ = k;
        o.seed_ = seed;
        o.salt_ = salt;
        return o;
    }
    throw infeasible("gave up after " + std::to_string(kMaxSalts) + " attempts");
}

}  // namespace relayguard
