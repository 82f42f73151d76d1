#pragma once

// Independent reference computations for the tests. Nothing here goes
// through the library's shortest-path machinery: distances come from a
// cubic relaxation sweep and paths from explicit enumeration.

#include "relhyp/metric_graph.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace test_oracles {

using relhyp::MetricGraph;
using relhyp::Rat;

// all-pairs distances by iterated relaxation (Floyd-Warshall)
inline std::vector<std::vector<Rat>> fw_all_pairs(const MetricGraph& g) {
    const Rat inf = -1;  // sentinel: no path found yet
    std::vector<std::vector<Rat>> d(g.n, std::vector<Rat>(g.n, inf));
    for (int v = 0; v < g.n; ++v) d[v][v] = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [u, v] = g.edge_ends[e];
        if (d[u][v] < 0 || g.edge_len[e] < d[u][v]) {
            d[u][v] = g.edge_len[e];
            d[v][u] = g.edge_len[e];
        }
    }
    for (int k = 0; k < g.n; ++k)
        for (int i = 0; i < g.n; ++i) {
            if (d[i][k] < 0) continue;
            for (int j = 0; j < g.n; ++j) {
                if (d[k][j] < 0) continue;
                Rat via = d[i][k] + d[k][j];
                if (d[i][j] < 0 || via < d[i][j]) d[i][j] = via;
            }
        }
    return d;
}

// four-point constant scanned directly off the relaxation matrix
inline Rat fp_delta_direct(const MetricGraph& g) {
    auto d = fw_all_pairs(g);
    Rat best = 0;
    for (int a = 0; a < g.n; ++a)
        for (int b = a + 1; b < g.n; ++b)
            for (int c = b + 1; c < g.n; ++c)
                for (int e = c + 1; e < g.n; ++e) {
                    Rat s1 = d[a][b] + d[c][e];
                    Rat s2 = d[a][c] + d[b][e];
                    Rat s3 = d[a][e] + d[b][c];
                    Rat hi = std::max({s1, s2, s3});
                    Rat lo = std::min({s1, s2, s3});
                    Rat mid = s1 + s2 + s3 - hi - lo;
                    if (hi - mid > best) best = hi - mid;
                }
    return best / 2;
}

// every geodesic between u and v, as vertex sequences (small graphs only)
inline std::vector<std::vector<int>> enumerate_geodesics(const MetricGraph& g, int u, int v) {
    auto d = fw_all_pairs(g);
    std::vector<std::vector<int>> out;
    std::vector<int> cur{u};
    std::function<void(int, Rat)> dfs = [&](int at, Rat used) {
        if (at == v) {
            out.push_back(cur);
            return;
        }
        for (const auto& e : g.adj[at]) {
            Rat nu = used + g.edge_len[e.eid];
            if (nu + d[e.to][v] == d[u][v]) {
                cur.push_back(e.to);
                dfs(e.to, nu);
                cur.pop_back();
            }
        }
    };
    dfs(u, Rat(0));
    return out;
}

// the smallest-lexicographic-predecessor-sequence rule applied to an
// explicit list of geodesics: pick the one whose reversed vertex sequence
// is lexicographically least
inline std::vector<int> apply_tie_break(std::vector<std::vector<int>> geodesics) {
    for (auto& p : geodesics) std::reverse(p.begin(), p.end());
    std::sort(geodesics.begin(), geodesics.end());
    auto best = geodesics.front();
    std::reverse(best.begin(), best.end());
    return best;
}

// minimal quasigeodesic constant of a path, from the relaxation matrix
inline Rat quasigeodesic_K(const MetricGraph& g, const std::vector<int>& path) {
    auto d = fw_all_pairs(g);
    std::vector<Rat> prefix{Rat(0)};
    for (size_t i = 0; i + 1 < path.size(); ++i)
        prefix.push_back(prefix.back() + *g.edge_length(path[i], path[i + 1]));
    Rat K = 1;
    for (size_t i = 0; i < path.size(); ++i)
        for (size_t j = i + 1; j < path.size(); ++j) {
            Rat len = prefix[j] - prefix[i];
            Rat bound = len / (d[path[i]][path[j]] + 1);
            if (bound > K) K = bound;
        }
    return K;
}

}  // namespace test_oracles
