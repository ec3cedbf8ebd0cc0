#include "discovery/pc_stable.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "common/error.hpp"
#include "discovery/ci_tests.hpp"

namespace cfrca {

namespace {

using Pair = std::pair<std::size_t, std::size_t>;

Pair ordered(std::size_t a, std::size_t b) { return a < b ? Pair{a, b} : Pair{b, a}; }

// Calls fn(subset) for each size-k subset of `pool` in lexicographic order;
// stops early when fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<std::size_t>& pool, std::size_t k, Fn&& fn) {
    if (k > pool.size()) return false;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    std::vector<std::size_t> subset(k);
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = pool[pick[i]];
        if (fn(subset)) return true;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == pool.size() - k + (i - 1)) --i;
        if (i == 0) return false;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

class Orienter {
public:
    Orienter(const std::vector<Node>& cols, LaggedDag& dag) : cols_(cols), dag_(dag) {}

    bool directed(std::size_t a, std::size_t b) const { return dag_.has_edge(cols_[a], cols_[b]); }
    bool undirected(std::size_t a, std::size_t b) const { return undirected_.count(ordered(a, b)) > 0; }
    bool adjacent(std::size_t a, std::size_t b) const {
        return undirected(a, b) || directed(a, b) || directed(b, a);
    }

    void add_undirected(std::size_t a, std::size_t b) { undirected_.insert(ordered(a, b)); }
    void add_directed(std::size_t a, std::size_t b) { dag_.add_edge(cols_[a], cols_[b]); }

    // Orients a - b as a -> b if it is still undirected and stays acyclic.
    bool orient(std::size_t a, std::size_t b) {
        if (!undirected(a, b)) return false;
        if (!dag_.can_add_edge(cols_[a], cols_[b])) return false;
        dag_.add_edge(cols_[a], cols_[b]);
        undirected_.erase(ordered(a, b));
        return true;
    }

    const std::set<Pair>& undirected_edges() const { return undirected_; }

private:
    const std::vector<Node>& cols_;
    LaggedDag& dag_;
    std::set<Pair> undirected_;
};

}  // namespace

PcResult pc_stable(const LaggedDataMatrix& data, const PcOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
    if (options.max_depth < 0) throw ValidationError("max_depth must be non-negative");

    const auto& cols = data.columns;
    const std::size_t n = cols.size();
    const FisherZ ci(data);

    PcResult result{LaggedDag(data.max_lag, cols), {}, 0};

    std::vector<std::set<std::size_t>> adj(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (cols[a].lag != 0 && cols[b].lag != 0) continue;
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }

    std::map<Pair, std::vector<std::size_t>> sepset;
    for (int depth = 0; depth <= options.max_depth; ++depth) {
        const auto snapshot = adj;
        const auto k = static_cast<std::size_t>(depth);
        bool testable = false;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b : snapshot[a]) {
                if (b < a || !adj[a].count(b)) continue;
                for (const auto& [x, y] : {Pair{a, b}, Pair{b, a}}) {
                    std::vector<std::size_t> pool;
                    for (auto c : snapshot[x]) {
                        if (c != y) pool.push_back(c);
                    }
                    if (pool.size() < k) continue;
                    testable = true;
                    const bool removed = for_each_subset(pool, k, [&](const std::vector<std::size_t>& s) {
                        ++result.ci_tests;
                        if (ci.test(x, y, s).p_value > options.alpha) {
                            adj[a].erase(b);
                            adj[b].erase(a);
                            sepset[ordered(a, b)] = s;
                            return true;
                        }
                        return false;
                    });
                    if (removed) break;
                }
            }
        }
        if (!testable) break;
    }

    Orienter g(cols, result.dag);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b : adj[a]) {
            if (b < a) continue;
            if (cols[a].lag > 0) {
                g.add_directed(a, b);
            } else if (cols[b].lag > 0) {
                g.add_directed(b, a);
            } else {
                g.add_undirected(a, b);
            }
        }
    }

    // Unshielded colliders x -> z <- y with z outside sepset(x, y).
    for (std::size_t z = 0; z < n; ++z) {
        if (cols[z].lag != 0) continue;
        const std::vector<std::size_t> nb(adj[z].begin(), adj[z].end());
        for (std::size_t i = 0; i < nb.size(); ++i) {
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                const auto x = nb[i], y = nb[j];
                const auto sep = sepset.find(ordered(x, y));
                if (sep == sepset.end()) continue;
                if (std::find(sep->second.begin(), sep->second.end(), z) != sep->second.end()) continue;
                g.orient(x, z);
                g.orient(y, z);
            }
        }
    }

    // Meek rules R1-R3 to a fixed point.
    for (bool changed = true; changed;) {
        changed = false;
        const std::vector<Pair> pending(g.undirected_edges().begin(), g.undirected_edges().end());
        for (const auto& [p, q] : pending) {
            for (const auto& [b, c] : {Pair{p, q}, Pair{q, p}}) {
                if (!g.undirected(b, c)) break;
                bool fire = false;
                for (std::size_t a = 0; a < n && !fire; ++a) {
                    // R1: a -> b - c, a and c nonadjacent.
                    if (a != c && g.directed(a, b) && !g.adjacent(a, c)) fire = true;
                    // R2: b -> a -> c with b - c.
                    if (g.directed(b, a) && g.directed(a, c)) fire = true;
                }
                // R3: b - d1 -> c <- d2 - b, d1 and d2 nonadjacent.
                for (std::size_t d1 = 0; d1 < n && !fire; ++d1) {
                    if (!g.undirected(b, d1) || !g.directed(d1, c)) continue;
                    for (std::size_t d2 = d1 + 1; d2 < n; ++d2) {
                        if (g.undirected(b, d2) && g.directed(d2, c) && !g.adjacent(d1, d2)) {
                            fire = true;
                            break;
                        }
                    }
                }
                if (fire && g.orient(b, c)) {
                    changed = true;
                    break;
                }
            }
        }
    }

    const std::vector<Pair> leftover(g.undirected_edges().begin(), g.undirected_edges().end());
    for (const auto& [a, b] : leftover) {
        std::size_t from = a, to = b;
        if (!options.sink.empty() && cols[a].var == options.sink) {
            std::swap(from, to);
        } else if (!(!options.sink.empty() && cols[b].var == options.sink) && cols[a].var > cols[b].var) {
            std::swap(from, to);
        }
        if (!g.orient(from, to)) {
            g.orient(to, from);
            std::swap(from, to);
        }
        result.prior_oriented.emplace_back(cols[from], cols[to]);
    }
    return result;
}

}  // namespace cfrca
